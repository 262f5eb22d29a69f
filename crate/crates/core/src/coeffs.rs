//! Likelihood ratio Haar (LRH) coefficients g and Fisz coefficients f.
//!
//! Both are functions of the two half-block means (u, v) at scale j, where
//! each half holds 2^(j-1) observations. Writing m = (u + v)/2 and
//! delta = (u - v)/(u + v), the Poisson log-likelihood ratio bracket is
//! m * phi(delta) with phi(d) = (1+d) ln(1+d) + (1-d) ln(1-d), and the
//! scaled chi-squared bracket is -(dof/2) ln(1 - delta^2). Evaluating them in
//! this form keeps the radicand nonnegative in floating point.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LrhError, Result};
use crate::haar::{local_means, validate_levels, HaarDecomposition, ScaleLevel};
use crate::signal::Signal;

/// Radicands more negative than this indicate a bug rather than rounding.
pub const RADICAND_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseFamily {
    Poisson,
    /// X = sigma^2 / m * chi^2_m, m >= 1 degrees of freedom.
    ScaledChiSquared {
        m: u32,
    },
    Gaussian {
        sigma: f64,
    },
}

impl NoiseFamily {
    pub fn chisq(m: u32) -> Result<Self> {
        let fam = NoiseFamily::ScaledChiSquared { m };
        fam.validate()?;
        Ok(fam)
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        let fam = NoiseFamily::Gaussian { sigma };
        fam.validate()?;
        Ok(fam)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseFamily::Poisson => Ok(()),
            NoiseFamily::ScaledChiSquared { m } if m >= 1 => Ok(()),
            NoiseFamily::ScaledChiSquared { m } => {
                Err(LrhError::domain(format!("chi-squared degrees of freedom must be >= 1, got {m}")))
            }
            NoiseFamily::Gaussian { sigma } if sigma > 0.0 && sigma.is_finite() => Ok(()),
            NoiseFamily::Gaussian { sigma } => {
                Err(LrhError::domain(format!("gaussian sigma must be positive, got {sigma}")))
            }
        }
    }

    /// Checks that a single observation or mean lies in the family's domain.
    pub fn check_value(&self, x: f64) -> std::result::Result<(), &'static str> {
        match self {
            NoiseFamily::Poisson if x < 0.0 => Err("negative value in Poisson data"),
            NoiseFamily::ScaledChiSquared { .. } if x <= 0.0 => Err("nonpositive value in chi-squared data"),
            _ => Ok(()),
        }
    }

    /// Checks every element, naming the first offending index.
    pub fn check_signal(&self, x: &Signal) -> Result<()> {
        self.validate()?;
        for (i, v) in x.iter().enumerate() {
            if let Err(msg) = self.check_value(*v) {
                return Err(LrhError::domain(format!("{msg}: x[{i}] = {v}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for NoiseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseFamily::Poisson => write!(f, "poisson"),
            NoiseFamily::ScaledChiSquared { m } => write!(f, "chisq:{m}"),
            NoiseFamily::Gaussian { sigma } => write!(f, "gaussian:{sigma}"),
        }
    }
}

impl FromStr for NoiseFamily {
    type Err = LrhError;

    /// Parses `poisson`, `chisq:<m>` or `gaussian:<sigma>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let bad = || LrhError::domain(format!("unrecognised noise family {s:?}"));
        let fam = match (name.to_ascii_lowercase().as_str(), arg) {
            ("poisson", None) => NoiseFamily::Poisson,
            ("chisq", Some(m)) => NoiseFamily::ScaledChiSquared { m: m.parse().map_err(|_| bad())? },
            ("exponential" | "exp", None) => NoiseFamily::ScaledChiSquared { m: 2 },
            ("gaussian", Some(sigma)) => NoiseFamily::Gaussian { sigma: sigma.parse().map_err(|_| bad())? },
            ("gaussian", None) => NoiseFamily::Gaussian { sigma: 1.0 },
            _ => return Err(bad()),
        };
        fam.validate()?;
        Ok(fam)
    }
}

/// Left/right half-block means at scale j (each half has 2^(j-1) points).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPairStats {
    pub u: f64,
    pub v: f64,
    pub j: usize,
}

impl HalfPairStats {
    pub fn new(u: f64, v: f64, j: usize) -> Self {
        HalfPairStats { u, v, j }
    }

    fn scale_factor(&self) -> f64 {
        2f64.powf(self.j as f64 / 2.0)
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// phi(d) = (1+d) ln(1+d) + (1-d) ln(1-d) on [-1, 1], with 0 ln 0 = 0.
/// Increasing in |d| from phi(0) = 0 to phi(1) = 2 ln 2.
pub(crate) fn poisson_phi(d: f64) -> f64 {
    let a = d.abs();
    if a < 1e-2 {
        // sum_k d^(2k) / (k (2k - 1))
        let d2 = a * a;
        let mut term = d2;
        let mut acc = 0.0;
        for k in 1..=6 {
            let kf = k as f64;
            acc += term / (kf * (2.0 * kf - 1.0));
            term *= d2;
        }
        acc
    } else if a >= 1.0 {
        2.0 * std::f64::consts::LN_2
    } else {
        (1.0 + a) * a.ln_1p() + (1.0 - a) * (-a).ln_1p()
    }
}

fn check_poisson(p: &HalfPairStats) -> Result<()> {
    if !(p.u >= 0.0 && p.v >= 0.0) || !p.u.is_finite() || !p.v.is_finite() {
        return Err(LrhError::domain(format!(
            "Poisson half-means must be finite and nonnegative, got u = {}, v = {}",
            p.u, p.v
        )));
    }
    Ok(())
}

fn check_chisq(p: &HalfPairStats, m: u32) -> Result<()> {
    if m == 0 {
        return Err(LrhError::domain("chi-squared degrees of freedom must be >= 1"));
    }
    if !(p.u > 0.0 && p.v > 0.0) || !p.u.is_finite() || !p.v.is_finite() {
        return Err(LrhError::domain(format!(
            "chi-squared half-means must be finite and positive, got u = {}, v = {}",
            p.u, p.v
        )));
    }
    Ok(())
}

fn signed_root(diff: f64, scale: f64, radicand: f64) -> Result<f64> {
    if radicand < -RADICAND_TOLERANCE || radicand.is_nan() {
        return Err(LrhError::Internal(format!("negative log-likelihood ratio radicand {radicand}")));
    }
    Ok(sign(diff) * scale * radicand.max(0.0).sqrt())
}

/// Bracket u ln u + v ln v - (u+v) ln((u+v)/2) of the Poisson LRH coefficient.
pub fn poisson_radicand(u: f64, v: f64) -> f64 {
    let sum = u + v;
    if sum == 0.0 {
        return 0.0;
    }
    0.5 * sum * poisson_phi((u - v) / sum)
}

/// Bracket ln((u+v)/2) - (ln u + ln v)/2 of the chi-squared LRH coefficient
/// for one degree of freedom.
pub fn chisq_radicand(u: f64, v: f64) -> f64 {
    let d = (u - v) / (u + v);
    let d2 = d * d;
    if d2 < 0.5 {
        -0.5 * (-d2).ln_1p()
    } else {
        // 1 - d^2 = 4uv/(u+v)^2, formed without the cancellation
        let r = 2.0 * u.sqrt() * v.sqrt() / (u + v);
        -r.ln()
    }
}

/// Poisson LRH coefficient.
pub fn g_poisson(p: &HalfPairStats) -> Result<f64> {
    check_poisson(p)?;
    signed_root(p.u - p.v, p.scale_factor(), poisson_radicand(p.u, p.v))
}

/// Scaled chi-squared LRH coefficient with m degrees of freedom.
pub fn g_chisq(p: &HalfPairStats, m: u32) -> Result<f64> {
    check_chisq(p, m)?;
    signed_root(p.u - p.v, p.scale_factor(), m as f64 * chisq_radicand(p.u, p.v))
}

/// Poisson Fisz coefficient: Haar detail over the square root of the pooled
/// mean. Zero when u = v = 0.
pub fn f_poisson(p: &HalfPairStats) -> Result<f64> {
    check_poisson(p)?;
    let mean = 0.5 * (p.u + p.v);
    if mean == 0.0 {
        return Ok(0.0);
    }
    Ok(2f64.powf(p.j as f64 / 2.0 - 1.0) * (p.u - p.v) / mean.sqrt())
}

/// Scaled chi-squared Fisz coefficient.
pub fn f_chisq(p: &HalfPairStats, m: u32) -> Result<f64> {
    check_chisq(p, m)?;
    let mean = 0.5 * (p.u + p.v);
    Ok(2f64.powf((p.j as f64 - 3.0) / 2.0) * (m as f64).sqrt() * (p.u - p.v) / mean)
}

fn gaussian_detail(p: &HalfPairStats, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(LrhError::domain(format!("gaussian sigma must be positive, got {sigma}")));
    }
    Ok(2f64.powf(p.j as f64 / 2.0 - 1.0) * (p.u - p.v) / sigma)
}

/// LRH coefficient for any supported family. For Gaussian noise it is the
/// standard Haar detail divided by sigma.
pub fn g_coefficient(p: &HalfPairStats, fam: NoiseFamily) -> Result<f64> {
    match fam {
        NoiseFamily::Poisson => g_poisson(p),
        NoiseFamily::ScaledChiSquared { m } => g_chisq(p, m),
        NoiseFamily::Gaussian { sigma } => gaussian_detail(p, sigma),
    }
}

/// Fisz coefficient for any supported family; coincides with the LRH
/// coefficient in the Gaussian case.
pub fn f_coefficient(p: &HalfPairStats, fam: NoiseFamily) -> Result<f64> {
    match fam {
        NoiseFamily::Poisson => f_poisson(p),
        NoiseFamily::ScaledChiSquared { m } => f_chisq(p, m),
        NoiseFamily::Gaussian { sigma } => gaussian_detail(p, sigma),
    }
}

/// The LRH transform of a signal: g_{j,k} per scale plus the coarsest
/// standard smooth coefficient s_{J,1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrhDecomposition {
    pub n: usize,
    pub levels: Vec<ScaleLevel>,
    pub smooth_top: f64,
    pub family: NoiseFamily,
}

impl LrhDecomposition {
    pub fn num_scales(&self) -> usize {
        self.levels.len()
    }

    /// g_j, j = 1 finest.
    pub fn coefficients(&self, j: usize) -> &[f64] {
        &self.levels[j - 1].coefficients
    }

    pub fn coefficients_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.levels[j - 1].coefficients
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        validate_levels(self.n, &self.levels)?;
        if !self.smooth_top.is_finite() {
            return Err(LrhError::Shape("smooth coefficient is not finite".into()));
        }
        Ok(())
    }

    /// Reinterprets g as ordinary Haar details, the input to the standard
    /// synthesis that defines G(X).
    pub fn as_haar(&self) -> HaarDecomposition {
        HaarDecomposition { n: self.n, levels: self.levels.clone(), smooth_top: self.smooth_top }
    }

    pub fn from_haar(h: HaarDecomposition, family: NoiseFamily) -> Self {
        LrhDecomposition { n: h.n, levels: h.levels, smooth_top: h.smooth_top, family }
    }
}

/// Forward LRH transform, O(n).
pub fn lrh_forward(x: &Signal, fam: NoiseFamily) -> Result<LrhDecomposition> {
    let big_j = x.levels()?;
    fam.check_signal(x)?;
    let table = local_means(x)?;
    let mut levels = Vec::with_capacity(big_j);
    for j in 1..=big_j {
        let count = x.len() >> j;
        let coefficients = (1..=count)
            .map(|k| {
                let (u, v) = table.halves(j, k);
                g_coefficient(&HalfPairStats::new(u, v, j), fam)
            })
            .collect::<Result<Vec<_>>>()?;
        levels.push(ScaleLevel { scale: j, coefficients });
    }
    let smooth_top = 2f64.powf(big_j as f64 / 2.0) * table.scale(big_j)[0];
    Ok(LrhDecomposition { n: x.len(), levels, smooth_top, family: fam })
}
