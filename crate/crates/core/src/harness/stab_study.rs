//! How well G normalizes one noisy realization: the residual
//! G(X) - G(Theta), its variance, normal Q-Q points and autocorrelations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LrhError, Result};
use crate::harness::{ReportMeta, SimModel, DEFAULT_N};
use crate::sampling::{sample_family_with, RngSeed};
use crate::signal::Signal;
use crate::stabilize::{stabilize, stabilize_ti};
use crate::stats::{acf, bartlett_band, moment_stats, normal_qq_points, MomentStats};

pub const MAX_LAG: usize = 50;

/// Which version of G to apply: the decimated transform or its average over
/// all cyclic shifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabVariant {
    Decimated,
    TranslationInvariant,
}

impl fmt::Display for StabVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StabVariant::Decimated => "dec",
            StabVariant::TranslationInvariant => "ti",
        })
    }
}

impl FromStr for StabVariant {
    type Err = LrhError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dec" | "decimated" => Ok(StabVariant::Decimated),
            "ti" => Ok(StabVariant::TranslationInvariant),
            _ => Err(LrhError::domain(format!("unknown transform variant {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabStudyReport {
    pub meta: ReportMeta,
    pub model: SimModel,
    pub n: usize,
    pub variant: StabVariant,
    pub variance: f64,
    pub moments: MomentStats,
    pub bartlett_band: f64,
    /// Fraction of lags 1..=50 whose residual autocorrelation lies inside
    /// the band.
    pub acf_inside_fraction: f64,
    pub residual: Signal,
    pub qq: Vec<(f64, f64)>,
    pub acf_res: Vec<f64>,
    pub acf_res_sq: Vec<f64>,
}

pub fn stabilization_study(
    model: SimModel,
    n: Option<usize>,
    variant: StabVariant,
    seed: RngSeed,
) -> Result<StabStudyReport> {
    let n = n.unwrap_or(DEFAULT_N);
    if n <= MAX_LAG {
        return Err(LrhError::domain(format!("stabilization study needs n > {MAX_LAG}")));
    }
    let fam = model.family();
    let theta = model.truth(n)?;
    let x = sample_family_with(&theta, fam, &mut seed.substream(model.stream(0)))?;
    let g = |s: &Signal| match variant {
        StabVariant::Decimated => stabilize(s, fam),
        StabVariant::TranslationInvariant => stabilize_ti(s, fam),
    };
    let gx = g(&x)?;
    let gt = g(&theta)?;
    let residual = Signal::new(gx.iter().zip(gt.iter()).map(|(a, b)| a - b).collect())?;
    let moments = moment_stats(&residual)?;
    let acf_res = acf(&residual, MAX_LAG)?;
    let squared: Vec<f64> = residual.iter().map(|r| r * r).collect();
    let acf_res_sq = acf(&squared, MAX_LAG)?;
    let band = bartlett_band(n);
    let inside = acf_res[1..].iter().filter(|c| c.abs() <= band).count();
    Ok(StabStudyReport {
        meta: ReportMeta::new(seed.0),
        model,
        n,
        variant,
        variance: moments.variance,
        moments,
        bartlett_band: band,
        acf_inside_fraction: inside as f64 / MAX_LAG as f64,
        qq: normal_qq_points(&residual)?,
        residual,
        acf_res,
        acf_res_sq,
    })
}
