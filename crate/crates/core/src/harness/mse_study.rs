//! Mean squared error of the LRH and Haar-Fisz smoothers on the four
//! simulation models, with both statistics applied to the same noise draws.

use serde::{Deserialize, Serialize};

use crate::denoise::{denoise, mse, universal_threshold, DenoiseConfig, Statistic, Variant};
use crate::error::{LrhError, Result};
use crate::harness::{run_replications, ReportMeta, SimModel, DEFAULT_N};
use crate::sampling::{sample_family_with, RngSeed};
use crate::stats::{five_number_summary, FiveNumber};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseStudyConfig {
    pub models: Vec<SimModel>,
    pub statistics: Vec<Statistic>,
    pub replications: usize,
    pub n: usize,
    pub j0: usize,
    pub variant: Variant,
    /// `None` selects the universal threshold sqrt(2 ln n).
    pub threshold: Option<f64>,
}

impl MseStudyConfig {
    /// All four models, both statistics, TI smoothing, universal threshold,
    /// J0 = 0, n = 2048.
    pub fn table(replications: usize) -> Self {
        MseStudyConfig {
            models: SimModel::ALL.to_vec(),
            statistics: vec![Statistic::Lrh, Statistic::Fisz],
            replications,
            n: DEFAULT_N,
            j0: 0,
            variant: Variant::TranslationInvariant,
            threshold: None,
        }
    }

    fn denoise_config(&self, model: SimModel, statistic: Statistic) -> Result<DenoiseConfig> {
        Ok(DenoiseConfig {
            threshold: match self.threshold {
                Some(t) => t,
                None => universal_threshold(self.n)?,
            },
            j0: self.j0,
            variant: self.variant,
            family: model.family(),
            statistic,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseCell {
    pub model: SimModel,
    pub statistic: Statistic,
    pub mean_mse: f64,
    pub standard_error: f64,
    pub replications: usize,
    pub summary: FiveNumber,
    pub mse: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseStudyReport {
    pub meta: ReportMeta,
    pub config: MseStudyConfig,
    pub threshold: f64,
    pub cells: Vec<MseCell>,
}

impl MseStudyReport {
    pub fn cell(&self, model: SimModel, statistic: Statistic) -> Option<&MseCell> {
        self.cells.iter().find(|c| c.model == model && c.statistic == statistic)
    }
}

/// For each model, replication r samples one noisy signal from stream
/// `model.stream(r)` and denoises it with every requested statistic.
pub fn mse_study(cfg: &MseStudyConfig, seed: RngSeed, jobs: usize) -> Result<MseStudyReport> {
    if cfg.replications < 2 {
        return Err(LrhError::domain("mse study needs at least 2 replications"));
    }
    if cfg.models.is_empty() || cfg.statistics.is_empty() {
        return Err(LrhError::domain("mse study needs at least one model and one statistic"));
    }
    let mut cells = Vec::new();
    for &model in &cfg.models {
        let truth = model.truth(cfg.n)?;
        let configs =
            cfg.statistics.iter().map(|s| cfg.denoise_config(model, *s)).collect::<Result<Vec<_>>>()?;
        let per_rep = run_replications(cfg.replications, jobs, |r| {
            let mut rng = seed.substream(model.stream(r));
            let x = sample_family_with(&truth, model.family(), &mut rng)?;
            configs.iter().map(|c| mse(&denoise(&x, c)?, &truth)).collect::<Result<Vec<_>>>()
        })?;
        for (i, &statistic) in cfg.statistics.iter().enumerate() {
            let values: Vec<f64> = per_rep.iter().map(|row| row[i]).collect();
            let reps = values.len() as f64;
            let mean = values.iter().sum::<f64>() / reps;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (reps - 1.0);
            cells.push(MseCell {
                model,
                statistic,
                mean_mse: mean,
                standard_error: (var / reps).sqrt(),
                replications: values.len(),
                summary: five_number_summary(&values)?,
                mse: values,
            });
        }
    }
    let threshold = match cfg.threshold {
        Some(t) => t,
        None => universal_threshold(cfg.n)?,
    };
    Ok(MseStudyReport { meta: ReportMeta::new(seed.0), config: cfg.clone(), threshold, cells })
}
