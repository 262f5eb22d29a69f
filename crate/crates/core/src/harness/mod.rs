//! Seeded Monte-Carlo experiment drivers and count-data ingestion.
//!
//! Replication `r` of an experiment draws from its own ChaCha8 stream, so
//! results do not depend on how replications are scheduled; aggregates are
//! always summed in replication order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::NoiseFamily;
use crate::error::{LrhError, Result};
use crate::models::{make_signal, Shape, TestSignalSpec};
use crate::sampling::{GAMMA_ALGORITHM, POISSON_ALGORITHM, RNG_ALGORITHM};
use crate::signal::Signal;

pub mod coeff_study;
pub mod counts;
pub mod mse_study;
pub mod report;
pub mod stab_study;

pub use coeff_study::{coeff_study, CoeffStudyReport, CoeffStudySpec};
pub use counts::{denoise_counts, load_counts, ColumnSpec, CountSeries, Windowing};
pub use mse_study::{mse_study, MseCell, MseStudyConfig, MseStudyReport};
pub use stab_study::{stabilization_study, StabStudyReport, StabVariant};

/// Blocks intensity range for the simulation models.
pub const BLOCKS_RANGE: (f64, f64) = (0.681, 27.029);
/// Bumps intensity range for the simulation models.
pub const BUMPS_RANGE: (f64, f64) = (1.0, 12.565);
pub const DEFAULT_N: usize = 2048;

/// The four simulation models: blocks or bumps intensity, with Poisson or
/// exponential (scaled chi-squared, m = 2) noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SimModel {
    #[serde(rename = "1a")]
    BlocksPoisson,
    #[serde(rename = "1b")]
    BlocksExponential,
    #[serde(rename = "2a")]
    BumpsPoisson,
    #[serde(rename = "2b")]
    BumpsExponential,
}

impl SimModel {
    pub const ALL: [SimModel; 4] = [
        SimModel::BlocksPoisson,
        SimModel::BlocksExponential,
        SimModel::BumpsPoisson,
        SimModel::BumpsExponential,
    ];

    pub fn code(self) -> &'static str {
        match self {
            SimModel::BlocksPoisson => "1a",
            SimModel::BlocksExponential => "1b",
            SimModel::BumpsPoisson => "2a",
            SimModel::BumpsExponential => "2b",
        }
    }

    pub fn family(self) -> NoiseFamily {
        match self {
            SimModel::BlocksPoisson | SimModel::BumpsPoisson => NoiseFamily::Poisson,
            SimModel::BlocksExponential | SimModel::BumpsExponential => {
                NoiseFamily::ScaledChiSquared { m: 2 }
            }
        }
    }

    pub fn signal_spec(self, n: usize) -> TestSignalSpec {
        let (shape, (lo, hi)) = match self {
            SimModel::BlocksPoisson | SimModel::BlocksExponential => (Shape::Blocks, BLOCKS_RANGE),
            SimModel::BumpsPoisson | SimModel::BumpsExponential => (Shape::Bumps, BUMPS_RANGE),
        };
        TestSignalSpec { shape, n, target_min: lo, target_max: hi }
    }

    pub fn truth(self, n: usize) -> Result<Signal> {
        make_signal(&self.signal_spec(n))
    }

    fn index(self) -> u64 {
        SimModel::ALL.iter().position(|m| *m == self).unwrap() as u64
    }

    /// Stream number for replication `rep` of this model.
    pub fn stream(self, rep: u64) -> u64 {
        (self.index() << 32) | rep
    }
}

impl fmt::Display for SimModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for SimModel {
    type Err = LrhError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1a" | "blocks-poisson" => Ok(SimModel::BlocksPoisson),
            "1b" | "blocks-exponential" => Ok(SimModel::BlocksExponential),
            "2a" | "bumps-poisson" => Ok(SimModel::BumpsPoisson),
            "2b" | "bumps-exponential" => Ok(SimModel::BumpsExponential),
            _ => Err(LrhError::domain(format!("unknown model {s:?}"))),
        }
    }
}

/// Provenance embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub rng: String,
    pub poisson_sampler: String,
    pub gamma_sampler: String,
}

impl ReportMeta {
    pub fn new(seed: u64) -> Self {
        ReportMeta {
            tool: "lrh".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            rng: RNG_ALGORITHM.into(),
            poisson_sampler: POISSON_ALGORITHM.into(),
            gamma_sampler: GAMMA_ALGORITHM.into(),
        }
    }
}

/// Runs `f(r)` for r in 0..reps, on `jobs` worker threads (1 = inline),
/// returning results in replication order.
pub fn run_replications<T, F>(reps: usize, jobs: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    if jobs <= 1 {
        return (0..reps as u64).map(&f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| LrhError::Internal(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..reps as u64).into_par_iter().map(&f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_metadata() {
        assert_eq!(SimModel::BumpsExponential.family(), NoiseFamily::ScaledChiSquared { m: 2 });
        assert_eq!("2a".parse::<SimModel>().unwrap(), SimModel::BumpsPoisson);
        assert!("3c".parse::<SimModel>().is_err());
        let t = SimModel::BlocksPoisson.truth(256).unwrap();
        assert_eq!(t.iter().cloned().fold(f64::INFINITY, f64::min), 0.681);
        assert_eq!(serde_json::to_string(&SimModel::BlocksExponential).unwrap(), "\"1b\"");
        assert_ne!(SimModel::BlocksPoisson.stream(3), SimModel::BumpsPoisson.stream(3));
    }

    #[test]
    fn replications_are_order_independent() {
        let serial = run_replications(50, 1, |r| Ok(r * r)).unwrap();
        let parallel = run_replications(50, 4, |r| Ok(r * r)).unwrap();
        assert_eq!(serial, parallel);
        assert!(run_replications(5, 2, |r| if r == 3 { Err(LrhError::domain("x")) } else { Ok(r) }).is_err());
    }
}
