//! Decimated orthonormal Haar pyramid and the dyadic block-means table.
//!
//! Scales are indexed j = 1 (finest) ..= J (coarsest) for n = 2^J. At scale
//! j there are 2^(J-j) detail coefficients, and location k (1-based) covers
//! the observations ((k-1)2^j, k 2^j].

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{LrhError, Result};
use crate::signal::{dyadic_levels, Signal};

/// Coefficients of one scale, labelled with its 1-based scale index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleLevel {
    pub scale: usize,
    pub coefficients: Vec<f64>,
}

/// Output of [`forward_haar`]: `levels[j - 1]` holds d_j (j = 1 finest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarDecomposition {
    pub n: usize,
    pub levels: Vec<ScaleLevel>,
    pub smooth_top: f64,
}

impl HaarDecomposition {
    /// Builds a decomposition from per-scale vectors (index 0 = scale 1),
    /// checking the dyadic shape.
    pub fn from_parts(n: usize, details: Vec<Vec<f64>>, smooth_top: f64) -> Result<Self> {
        let levels = details
            .into_iter()
            .enumerate()
            .map(|(i, coefficients)| ScaleLevel { scale: i + 1, coefficients })
            .collect();
        let h = HaarDecomposition { n, levels, smooth_top };
        h.validate()?;
        Ok(h)
    }

    pub fn num_scales(&self) -> usize {
        self.levels.len()
    }

    /// Detail coefficients d_j, j = 1 finest.
    pub fn detail(&self, j: usize) -> &[f64] {
        &self.levels[j - 1].coefficients
    }

    pub fn detail_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.levels[j - 1].coefficients
    }

    pub fn validate(&self) -> Result<()> {
        validate_levels(self.n, &self.levels)?;
        if !self.smooth_top.is_finite() {
            return Err(LrhError::Shape("smooth coefficient is not finite".into()));
        }
        Ok(())
    }

    /// Sum of squares of all coefficients.
    pub fn energy(&self) -> f64 {
        self.levels.iter().flat_map(|l| l.coefficients.iter()).map(|d| d * d).sum::<f64>()
            + self.smooth_top * self.smooth_top
    }
}

pub(crate) fn validate_levels(n: usize, levels: &[ScaleLevel]) -> Result<()> {
    let big_j = dyadic_levels(n)?;
    if levels.len() != big_j {
        return Err(LrhError::Shape(format!("expected {big_j} scales for n = {n}, found {}", levels.len())));
    }
    for (i, level) in levels.iter().enumerate() {
        let j = i + 1;
        if level.scale != j {
            return Err(LrhError::Shape(format!("scale label {} at position {j}", level.scale)));
        }
        let expected = n >> j;
        if level.coefficients.len() != expected {
            return Err(LrhError::Shape(format!(
                "scale {j} has {} coefficients, expected {expected}",
                level.coefficients.len()
            )));
        }
        if level.coefficients.iter().any(|c| !c.is_finite()) {
            return Err(LrhError::Shape(format!("non-finite coefficient at scale {j}")));
        }
    }
    Ok(())
}

/// Forward Haar pyramid, O(n).
pub fn forward_haar(x: &Signal) -> Result<HaarDecomposition> {
    let big_j = x.levels()?;
    let mut smooth = x.values().to_vec();
    let mut levels = Vec::with_capacity(big_j);
    for j in 1..=big_j {
        let half = smooth.len() / 2;
        let mut next = Vec::with_capacity(half);
        let mut detail = Vec::with_capacity(half);
        for pair in smooth.chunks_exact(2) {
            next.push(FRAC_1_SQRT_2 * (pair[0] + pair[1]));
            detail.push(FRAC_1_SQRT_2 * (pair[0] - pair[1]));
        }
        levels.push(ScaleLevel { scale: j, coefficients: detail });
        smooth = next;
    }
    Ok(HaarDecomposition { n: x.len(), levels, smooth_top: smooth[0] })
}

/// Inverse Haar pyramid: undoes [`forward_haar`] from scale J down to 1.
pub fn inverse_haar(h: &HaarDecomposition) -> Result<Signal> {
    h.validate()?;
    Signal::new(synthesize(&h.levels, h.smooth_top))
}

pub(crate) fn synthesize(levels: &[ScaleLevel], smooth_top: f64) -> Vec<f64> {
    let mut smooth = vec![smooth_top];
    for level in levels.iter().rev() {
        let mut finer = Vec::with_capacity(smooth.len() * 2);
        for (s, d) in smooth.iter().zip(&level.coefficients) {
            finer.push(FRAC_1_SQRT_2 * (s + d));
            finer.push(FRAC_1_SQRT_2 * (s - d));
        }
        smooth = finer;
    }
    smooth
}

/// Block means of the data at every scale. `means[j]` has 2^(J-j) entries,
/// the averages over blocks of 2^j observations; `means[0]` is the data.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMeansTable {
    means: Vec<Vec<f64>>,
}

impl LocalMeansTable {
    pub fn num_scales(&self) -> usize {
        self.means.len() - 1
    }

    pub fn scale(&self, j: usize) -> &[f64] {
        &self.means[j]
    }

    /// Left and right half means (u, v) of block k (1-based) at scale j >= 1.
    pub fn halves(&self, j: usize, k: usize) -> (f64, f64) {
        let child = &self.means[j - 1];
        (child[2 * k - 2], child[2 * k - 1])
    }
}

/// Builds the block-means table by pairwise averaging, so that every parent
/// mean is exactly the average of its two children.
pub fn local_means(x: &Signal) -> Result<LocalMeansTable> {
    let big_j = x.levels()?;
    let mut means = Vec::with_capacity(big_j + 1);
    means.push(x.values().to_vec());
    for j in 1..=big_j {
        let next: Vec<f64> = means[j - 1].chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect();
        means.push(next);
    }
    Ok(LocalMeansTable { means })
}
