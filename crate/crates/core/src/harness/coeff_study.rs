//! Sampling distribution of a single LRH coefficient and its Fisz
//! counterpart for two fixed half-block means.

use serde::{Deserialize, Serialize};

use crate::coeffs::{f_coefficient, g_coefficient, HalfPairStats, NoiseFamily};
use crate::error::{LrhError, Result};
use crate::harness::{run_replications, ReportMeta};
use crate::sampling::{sample_family_with, RngSeed};
use crate::stats::{histogram, moment_stats, Histogram, MomentStats};

const DIFF_BINS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoeffStudySpec {
    pub family: NoiseFamily,
    pub j: usize,
    pub mean_left: f64,
    pub mean_right: f64,
    pub replications: usize,
}

impl CoeffStudySpec {
    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if self.j == 0 || self.j > 30 {
            return Err(LrhError::domain(format!("scale must be in 1..=30, got {}", self.j)));
        }
        if self.replications < 4 {
            return Err(LrhError::domain(format!("need at least 4 replications, got {}", self.replications)));
        }
        for mean in [self.mean_left, self.mean_right] {
            self.family
                .check_value(mean)
                .map_err(|why| LrhError::domain(format!("half-block mean {mean}: {why}")))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffStudyReport {
    pub meta: ReportMeta,
    pub spec: CoeffStudySpec,
    pub stats_g: MomentStats,
    pub stats_f: MomentStats,
    /// Histogram of |g| - |f| over replications.
    pub diff_histogram: Histogram,
    /// Paired (g, f) per replication.
    pub g: Vec<f64>,
    pub f: Vec<f64>,
}

/// Replication r draws 2^(j-1) observations at each half-block mean from
/// stream r of `seed`, then evaluates g and f on the two sample means.
pub fn coeff_study(spec: &CoeffStudySpec, seed: RngSeed, jobs: usize) -> Result<CoeffStudyReport> {
    spec.validate()?;
    let half = 1usize << (spec.j - 1);
    let left = vec![spec.mean_left; half];
    let right = vec![spec.mean_right; half];
    let pairs = run_replications(spec.replications, jobs, |r| {
        let mut rng = seed.substream(r);
        let a = sample_family_with(&left, spec.family, &mut rng)?;
        let b = sample_family_with(&right, spec.family, &mut rng)?;
        let p = HalfPairStats::new(a.mean(), b.mean(), spec.j);
        Ok((g_coefficient(&p, spec.family)?, f_coefficient(&p, spec.family)?))
    })?;
    let (g, f): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let diffs: Vec<f64> = g.iter().zip(&f).map(|(a, b)| a.abs() - b.abs()).collect();
    Ok(CoeffStudyReport {
        meta: ReportMeta::new(seed.0),
        spec: *spec,
        stats_g: moment_stats(&g)?,
        stats_f: moment_stats(&f)?,
        diff_histogram: histogram(&diffs, DIFF_BINS)?,
        g,
        f,
    })
}
