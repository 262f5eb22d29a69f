//! Hard-threshold Haar smoothing with a variance-stabilized decision
//! statistic: a detail d_{j,k} survives iff |stat_{j,k}| > t and j > J0,
//! where stat is the LRH coefficient g or the Fisz coefficient f computed
//! from the same half-block means. The coarsest smooth is always kept.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coeffs::{f_coefficient, g_coefficient, HalfPairStats, NoiseFamily};
use crate::error::{LrhError, Result};
use crate::haar::{forward_haar, inverse_haar, local_means};
use crate::signal::Signal;
use crate::stationary::{forward_stationary, inverse_stationary_average, stationary_means};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Decimated,
    TranslationInvariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Lrh,
    Fisz,
}

impl Statistic {
    pub fn evaluate(self, p: &HalfPairStats, fam: NoiseFamily) -> Result<f64> {
        match self {
            Statistic::Lrh => g_coefficient(p, fam),
            Statistic::Fisz => f_coefficient(p, fam),
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistic::Lrh => "lrh",
            Statistic::Fisz => "fisz",
        })
    }
}

impl FromStr for Statistic {
    type Err = LrhError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lrh" => Ok(Statistic::Lrh),
            "fisz" => Ok(Statistic::Fisz),
            _ => Err(LrhError::domain(format!("unknown statistic {s:?}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Decimated => "dec",
            Variant::TranslationInvariant => "ti",
        })
    }
}

impl FromStr for Variant {
    type Err = LrhError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dec" | "decimated" => Ok(Variant::Decimated),
            "ti" | "stationary" | "translation-invariant" => Ok(Variant::TranslationInvariant),
            _ => Err(LrhError::domain(format!("unknown transform variant {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenoiseConfig {
    pub threshold: f64,
    /// Scales 1..=j0 are set to zero regardless of the statistic.
    pub j0: usize,
    pub variant: Variant,
    pub family: NoiseFamily,
    pub statistic: Statistic,
}

impl DenoiseConfig {
    /// Universal threshold, J0 = 0, translation-invariant, LRH statistic.
    pub fn universal(n: usize, family: NoiseFamily) -> Result<Self> {
        Ok(DenoiseConfig {
            threshold: universal_threshold(n)?,
            j0: 0,
            variant: Variant::TranslationInvariant,
            family,
            statistic: Statistic::Lrh,
        })
    }

    pub fn with_statistic(mut self, statistic: Statistic) -> Self {
        self.statistic = statistic;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn validate(&self, levels: usize) -> Result<()> {
        self.family.validate()?;
        if !(self.threshold > 0.0) {
            return Err(LrhError::domain(format!("threshold must be positive, got {}", self.threshold)));
        }
        if self.j0 >= levels {
            return Err(LrhError::domain(format!(
                "j0 = {} must be below the number of scales {levels}",
                self.j0
            )));
        }
        Ok(())
    }
}

/// sqrt(2 ln n).
pub fn universal_threshold(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(LrhError::domain(format!("universal threshold needs n >= 2, got {n}")));
    }
    Ok((2.0 * (n as f64).ln()).sqrt())
}

fn keep(stat: f64, cfg: &DenoiseConfig) -> bool {
    stat.abs() > cfg.threshold
}

/// Which coefficients survive thresholding, per scale (index 0 = scale 1).
/// Decimated masks have 2^(J-j) entries per scale, translation-invariant
/// masks have n.
pub fn kept_mask(x: &Signal, cfg: &DenoiseConfig) -> Result<Vec<Vec<bool>>> {
    let big_j = x.levels()?;
    cfg.validate(big_j)?;
    cfg.family.check_signal(x)?;
    let n = x.len();
    let mut mask = Vec::with_capacity(big_j);
    match cfg.variant {
        Variant::Decimated => {
            let table = local_means(x)?;
            for j in 1..=big_j {
                let count = n >> j;
                if j <= cfg.j0 {
                    mask.push(vec![false; count]);
                    continue;
                }
                let row = (1..=count)
                    .map(|k| {
                        let (u, v) = table.halves(j, k);
                        Ok(keep(cfg.statistic.evaluate(&HalfPairStats::new(u, v, j), cfg.family)?, cfg))
                    })
                    .collect::<Result<Vec<_>>>()?;
                mask.push(row);
            }
        }
        Variant::TranslationInvariant => {
            let means = stationary_means(x)?;
            for j in 1..=big_j {
                if j <= cfg.j0 {
                    mask.push(vec![false; n]);
                    continue;
                }
                let h = 1usize << (j - 1);
                let child = &means[j - 1];
                let row = (0..n)
                    .map(|p| {
                        let p_stats = HalfPairStats::new(child[p], child[(p + h) % n], j);
                        Ok(keep(cfg.statistic.evaluate(&p_stats, cfg.family)?, cfg))
                    })
                    .collect::<Result<Vec<_>>>()?;
                mask.push(row);
            }
        }
    }
    Ok(mask)
}

/// Decimated smoother: threshold, then inverse Haar.
pub fn denoise_decimated(x: &Signal, cfg: &DenoiseConfig) -> Result<Signal> {
    let cfg = cfg.with_variant(Variant::Decimated);
    let mask = kept_mask(x, &cfg)?;
    let mut h = forward_haar(x)?;
    for (j, row) in mask.iter().enumerate() {
        for (d, kept) in h.detail_mut(j + 1).iter_mut().zip(row) {
            if !kept {
                *d = 0.0;
            }
        }
    }
    inverse_haar(&h)
}

/// Translation-invariant smoother: thresholding at every scale and circular
/// shift, then average-basis reconstruction. Equal to averaging
/// [`denoise_decimated`] over all n cyclic shifts.
pub fn denoise_ti(x: &Signal, cfg: &DenoiseConfig) -> Result<Signal> {
    let cfg = cfg.with_variant(Variant::TranslationInvariant);
    let mask = kept_mask(x, &cfg)?;
    let mut sd = forward_stationary(x)?;
    for (j, row) in mask.iter().enumerate() {
        for (d, kept) in sd.level_mut(j + 1).detail.iter_mut().zip(row) {
            if !kept {
                *d = 0.0;
            }
        }
    }
    inverse_stationary_average(&sd)
}

pub fn denoise(x: &Signal, cfg: &DenoiseConfig) -> Result<Signal> {
    match cfg.variant {
        Variant::Decimated => denoise_decimated(x, cfg),
        Variant::TranslationInvariant => denoise_ti(x, cfg),
    }
}

/// Mean squared error n^{-1} ||estimate - truth||^2.
pub fn mse(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() || estimate.is_empty() {
        return Err(LrhError::Shape(format!("length mismatch: {} vs {}", estimate.len(), truth.len())));
    }
    Ok(estimate.iter().zip(truth).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / estimate.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn poisson_cfg(n: usize) -> DenoiseConfig {
        DenoiseConfig::universal(n, NoiseFamily::Poisson).unwrap()
    }

    #[test]
    fn universal_threshold_values() {
        assert_abs_diff_eq!(universal_threshold(2048).unwrap(), 3.905027, epsilon = 5e-7);
        assert_abs_diff_eq!(universal_threshold(8).unwrap(), 2.03933, epsilon = 5e-6);
        assert_abs_diff_eq!(universal_threshold(8).unwrap(), (2.0 * 8f64.ln()).sqrt(), epsilon = 1e-15);
        assert!(universal_threshold(4096).unwrap() > universal_threshold(2048).unwrap());
        assert!(universal_threshold(1).is_err());
    }

    #[test]
    fn mse_values() {
        assert_eq!(mse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(mse(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 6.0]).unwrap(), 1.0);
        assert!(mse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn infinite_threshold_gives_global_mean() {
        let x = Signal::new(vec![1.0, 7.0, 3.0, 0.0, 2.0, 9.0, 4.0, 4.0]).unwrap();
        for variant in [Variant::Decimated, Variant::TranslationInvariant] {
            let cfg = DenoiseConfig { threshold: f64::INFINITY, ..poisson_cfg(8) }.with_variant(variant);
            let y = denoise(&x, &cfg).unwrap();
            for v in y.iter() {
                assert_abs_diff_eq!(*v, 3.75, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn noiseless_jump_survives() {
        let mut theta = vec![2.0; 64];
        theta[24..].iter_mut().for_each(|v| *v = 40.0);
        let x = Signal::new(theta).unwrap();
        let cfg = poisson_cfg(64).with_variant(Variant::Decimated);
        let y = denoise_decimated(&x, &cfg).unwrap();
        for (a, b) in y.iter().zip(x.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn constant_input_is_fixed_point() {
        let x = Signal::constant(6.0, 32).unwrap();
        let y = denoise_ti(&x, &poisson_cfg(32)).unwrap();
        for v in y.iter() {
            assert_abs_diff_eq!(*v, 6.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ti_equals_cycle_spinning() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let lambda = [1.0, 1.0, 1.0, 1.0, 9.0, 9.0, 9.0, 9.0, 9.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 30.0];
        let x = Signal::new(
            lambda
                .iter()
                .map(|l: &f64| (l + rng.random_range(-1.0f64..1.0) * l.sqrt()).round().max(0.0))
                .collect(),
        )
        .unwrap();
        for statistic in [Statistic::Lrh, Statistic::Fisz] {
            let cfg = DenoiseConfig { threshold: 1.2, ..poisson_cfg(16) }.with_statistic(statistic);
            let fast = denoise_ti(&x, &cfg).unwrap();
            let mut slow = vec![0.0; 16];
            for p in 0..16 {
                let y = denoise_decimated(&x.rotate_left(p), &cfg).unwrap().rotate_right(p);
                for (a, v) in slow.iter_mut().zip(y.iter()) {
                    *a += v / 16.0;
                }
            }
            for (a, b) in fast.iter().zip(&slow) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn j0_forces_fine_scales_to_zero() {
        let x = Signal::new(vec![0.0, 50.0, 0.0, 50.0, 0.0, 50.0, 0.0, 50.0]).unwrap();
        let cfg = DenoiseConfig { j0: 1, ..poisson_cfg(8) }.with_variant(Variant::Decimated);
        let y = denoise(&x, &cfg).unwrap();
        for v in y.iter() {
            assert_abs_diff_eq!(*v, 25.0, epsilon = 1e-12);
        }
        let bad = DenoiseConfig { j0: 3, ..poisson_cfg(8) };
        assert!(denoise(&x, &bad).is_err());
    }

    #[test]
    fn ties_are_killed() {
        // |g| equals t exactly at this location
        let x = Signal::new(vec![4.0, 0.0]).unwrap();
        let g = g_coefficient(&HalfPairStats::new(4.0, 0.0, 1), NoiseFamily::Poisson).unwrap();
        let cfg = DenoiseConfig { threshold: g.abs(), ..poisson_cfg(2) }.with_variant(Variant::Decimated);
        assert_eq!(kept_mask(&x, &cfg).unwrap(), vec![vec![false]]);
    }

    #[test]
    fn parsing() {
        assert_eq!("fisz".parse::<Statistic>().unwrap(), Statistic::Fisz);
        assert_eq!("ti".parse::<Variant>().unwrap(), Variant::TranslationInvariant);
        assert_eq!("dec".parse::<Variant>().unwrap(), Variant::Decimated);
        assert!("soft".parse::<Statistic>().is_err());
    }

    #[test]
    fn domain_errors_propagate() {
        let x = Signal::new(vec![1.0, 0.0, 2.0, 3.0]).unwrap();
        let cfg = DenoiseConfig::universal(4, NoiseFamily::ScaledChiSquared { m: 2 }).unwrap();
        assert!(matches!(denoise(&x, &cfg), Err(LrhError::Domain(_))));
    }
}
