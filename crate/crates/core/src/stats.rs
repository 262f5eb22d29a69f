//! Sample moments, autocorrelation, normal Q-Q points and Kolmogorov–Smirnov
//! distances used by the experiment harness.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{LrhError, Result};

/// Variance uses the n-1 denominator; skewness m3/m2^1.5 and (non-excess)
/// kurtosis m4/m2^2 use central moments with denominator n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentStats {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

pub fn moment_stats(xs: &[f64]) -> Result<MomentStats> {
    if xs.len() < 4 {
        return Err(LrhError::domain(format!("need at least 4 samples, got {}", xs.len())));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    if !(m2 > 0.0) {
        return Err(LrhError::domain("sample has zero variance"));
    }
    let variance = m2 / (n - 1.0);
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    Ok(MomentStats { mean, variance, skewness: m3 / m2.powf(1.5), kurtosis: m4 / (m2 * m2) })
}

/// Sample autocorrelations at lags 0..=max_lag (lag 0 is 1).
pub fn acf(xs: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if max_lag >= xs.len() {
        return Err(LrhError::domain(format!(
            "max lag {max_lag} must be below the sample size {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let centered: Vec<f64> = xs.iter().map(|x| x - mean).collect();
    let c0: f64 = centered.iter().map(|c| c * c).sum();
    if !(c0 > 0.0) {
        return Err(LrhError::domain("sample has zero variance"));
    }
    Ok((0..=max_lag)
        .map(|k| centered.iter().zip(&centered[k..]).map(|(a, b)| a * b).sum::<f64>() / c0)
        .collect())
}

/// Half-width of the approximate 95% band for the autocorrelations of an
/// iid sample of size n.
pub fn bartlett_band(n: usize) -> f64 {
    1.96 / (n as f64).sqrt()
}

fn std_normal() -> Normal {
    Normal::standard()
}

/// (theoretical N(0,1) quantile at (i - 0.5)/n, i-th order statistic).
pub fn normal_qq_points(xs: &[f64]) -> Result<Vec<(f64, f64)>> {
    if xs.is_empty() {
        return Err(LrhError::domain("empty sample"));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let normal = std_normal();
    Ok(sorted.into_iter().enumerate().map(|(i, x)| (normal.inverse_cdf((i as f64 + 0.5) / n), x)).collect())
}

/// Kolmogorov–Smirnov distance between the empirical distribution of xs and
/// N(0,1), without rescaling the sample.
pub fn ks_distance_std_normal(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(LrhError::domain("empty sample"));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let normal = std_normal();
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        // handle ties as one jump of the empirical cdf
        let x = sorted[i];
        let mut end = i;
        while end + 1 < sorted.len() && sorted[end + 1] == x {
            end += 1;
        }
        let cdf = normal.cdf(x);
        d = d.max(cdf - i as f64 / n).max((end + 1) as f64 / n - cdf);
        i = end + 1;
    }
    Ok(d)
}

/// KS distance to N(0,1) after standardizing the sample by its own mean and
/// standard deviation.
pub fn ks_distance_normal(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(LrhError::domain("empty sample"));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    if !(var > 0.0) {
        return Err(LrhError::domain("sample has zero variance"));
    }
    let sd = var.sqrt();
    let z: Vec<f64> = xs.iter().map(|x| (x - mean) / sd).collect();
    ks_distance_std_normal(&z)
}

/// Minimum, lower quartile, median, upper quartile, maximum (linear
/// interpolation between order statistics).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn five_number_summary(xs: &[f64]) -> Result<FiveNumber> {
    if xs.is_empty() {
        return Err(LrhError::domain("empty sample"));
    }
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = p * (s.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        s[lo] + (h - lo as f64) * (s[hi] - s[lo])
    };
    Ok(FiveNumber { min: s[0], q1: q(0.25), median: q(0.5), q3: q(0.75), max: s[s.len() - 1] })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// bins + 1 increasing edges
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Equal-width histogram over the sample range.
pub fn histogram(xs: &[f64], bins: usize) -> Result<Histogram> {
    if xs.is_empty() || bins == 0 {
        return Err(LrhError::domain("histogram needs data and at least one bin"));
    }
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        hi = lo + 1.0;
    }
    let width = (hi - lo) / bins as f64;
    let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0; bins];
    for x in xs {
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Ok(Histogram { edges, counts })
}
