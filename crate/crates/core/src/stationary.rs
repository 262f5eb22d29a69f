//! Non-decimated (stationary, translation-invariant) Haar transform with
//! circular boundary handling and average-basis reconstruction.
//!
//! Indexing convention: at scale j the coefficient at position p (0-based)
//! is computed from the circular window x[p], x[p+1], ..., x[p + 2^j - 1]
//! (indices mod n); the left half is the first 2^(j-1) entries of that
//! window. With this convention `detail_j[(k-1) 2^j]` equals the decimated
//! coefficient d_{j,k}.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{LrhError, Result};
use crate::signal::{dyadic_levels, Signal};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryLevel {
    pub scale: usize,
    pub smooth: Vec<f64>,
    pub detail: Vec<f64>,
}

/// `levels[j - 1]` holds the length-n smooth and detail arrays of scale j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryDecomposition {
    pub n: usize,
    pub levels: Vec<StationaryLevel>,
}

impl StationaryDecomposition {
    pub fn num_scales(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, j: usize) -> &StationaryLevel {
        &self.levels[j - 1]
    }

    pub fn level_mut(&mut self, j: usize) -> &mut StationaryLevel {
        &mut self.levels[j - 1]
    }

    pub fn validate(&self) -> Result<()> {
        let big_j = dyadic_levels(self.n)?;
        if self.levels.len() != big_j {
            return Err(LrhError::Shape(format!(
                "expected {big_j} scales for n = {}, found {}",
                self.n,
                self.levels.len()
            )));
        }
        for (i, level) in self.levels.iter().enumerate() {
            if level.scale != i + 1 {
                return Err(LrhError::Shape(format!("scale label {} at position {}", level.scale, i + 1)));
            }
            if level.smooth.len() != self.n || level.detail.len() != self.n {
                return Err(LrhError::Shape(format!(
                    "scale {} arrays must have length {}",
                    level.scale, self.n
                )));
            }
        }
        Ok(())
    }
}

/// Stationary Haar analysis, O(n log n).
pub fn forward_stationary(x: &Signal) -> Result<StationaryDecomposition> {
    let big_j = x.levels()?;
    let n = x.len();
    let mut prev = x.values().to_vec();
    let mut levels = Vec::with_capacity(big_j);
    for j in 1..=big_j {
        let h = 1usize << (j - 1);
        let mut smooth = vec![0.0; n];
        let mut detail = vec![0.0; n];
        for p in 0..n {
            let a = prev[p];
            let b = prev[(p + h) % n];
            smooth[p] = FRAC_1_SQRT_2 * (a + b);
            detail[p] = FRAC_1_SQRT_2 * (a - b);
        }
        levels.push(StationaryLevel { scale: j, smooth: smooth.clone(), detail });
        prev = smooth;
    }
    Ok(StationaryDecomposition { n, levels })
}

/// Circular window means: `out[j][p]` is the mean of the 2^j observations
/// starting at p, for j = 0..=J. Each entry is the average of two entries of
/// the previous scale, in the same order as the decimated block means.
pub fn stationary_means(x: &Signal) -> Result<Vec<Vec<f64>>> {
    let big_j = x.levels()?;
    let n = x.len();
    let mut out = Vec::with_capacity(big_j + 1);
    out.push(x.values().to_vec());
    for j in 1..=big_j {
        let h = 1usize << (j - 1);
        let prev: &Vec<f64> = &out[j - 1];
        let next: Vec<f64> = (0..n).map(|p| 0.5 * (prev[p] + prev[(p + h) % n])).collect();
        out.push(next);
    }
    Ok(out)
}

/// Average-basis synthesis: the mean over all n cyclic shifts of the
/// decimated inverse applied to the coefficients belonging to that shift.
pub fn inverse_stationary_average(sd: &StationaryDecomposition) -> Result<Signal> {
    sd.validate()?;
    let n = sd.n;
    let big_j = sd.levels.len();
    let top = &sd.levels[big_j - 1].smooth;
    let base = top.iter().sum::<f64>() / n as f64 * 2f64.powf(-(big_j as f64) / 2.0);
    let mut out = vec![base; n];
    let mut prefix = vec![0.0; 2 * n + 1];
    for level in &sd.levels {
        let j = level.scale;
        let h = 1usize << (j - 1);
        if level.detail.iter().all(|d| *d == 0.0) {
            continue;
        }
        let weight = 2f64.powf(-1.5 * j as f64);
        for t in 0..2 * n {
            prefix[t + 1] = prefix[t] + level.detail[t % n];
        }
        // window(i) = sum of detail[q] over the h starts q = i-h+1 ..= i
        let window = |i: usize| -> f64 {
            let end = i + n + 1;
            prefix[end] - prefix[end - h]
        };
        for (i, o) in out.iter_mut().enumerate() {
            let left = window(i);
            let right = window((i + n - h) % n);
            *o += weight * (left - right);
        }
    }
    Signal::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::{forward_haar, inverse_haar, HaarDecomposition};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_signal(n: usize, seed: u64) -> Signal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Signal::new((0..n).map(|_| rng.random_range(-5.0..5.0)).collect()).unwrap()
    }

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    /// Cycle-spinning oracle: decimated inverse of the coefficients owned by
    /// each shift, unshifted and averaged.
    fn brute_force_average(sd: &StationaryDecomposition) -> Vec<f64> {
        let n = sd.n;
        let big_j = sd.levels.len();
        let mut acc = vec![0.0; n];
        for p in 0..n {
            let details: Vec<Vec<f64>> = (1..=big_j)
                .map(|j| (0..n >> j).map(|k| sd.level(j).detail[(p + (k << j)) % n]).collect())
                .collect();
            let h = HaarDecomposition::from_parts(n, details, sd.level(big_j).smooth[p]).unwrap();
            let y = inverse_haar(&h).unwrap().rotate_right(p);
            for (a, v) in acc.iter_mut().zip(y.iter()) {
                *a += v / n as f64;
            }
        }
        acc
    }

    #[test]
    fn constant_signal_has_zero_details() {
        let sd = forward_stationary(&Signal::constant(3.5, 16).unwrap()).unwrap();
        for level in &sd.levels {
            assert!(level.detail.iter().all(|d| *d == 0.0));
        }
    }

    #[test]
    fn shift_equivariance() {
        let x = random_signal(32, 1);
        let a = forward_stationary(&x.rotate_left(1)).unwrap();
        let b = forward_stationary(&x).unwrap();
        for j in 1..=5 {
            let mut rotated = b.level(j).detail.clone();
            rotated.rotate_left(1);
            assert!(max_abs_diff(&a.level(j).detail, &rotated) < 1e-12);
        }
    }

    #[test]
    fn subsampling_matches_decimated() {
        let x = Signal::new(vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0]).unwrap();
        let sd = forward_stationary(&x).unwrap();
        let h = forward_haar(&x).unwrap();
        for j in 1..=3 {
            for (k, d) in h.detail(j).iter().enumerate() {
                assert_eq!(sd.level(j).detail[k << j], *d);
            }
        }
        assert_eq!(sd.level(3).smooth[0], h.smooth_top);
    }

    #[test]
    fn unmodified_roundtrip() {
        for n in [2, 8, 64, 1024] {
            let x = random_signal(n, n as u64);
            let back = inverse_stationary_average(&forward_stationary(&x).unwrap()).unwrap();
            assert!(max_abs_diff(&back, &x) < 1e-10);
        }
    }

    #[test]
    fn zeroed_details_give_global_mean() {
        let x = random_signal(64, 2);
        let mut sd = forward_stationary(&x).unwrap();
        for level in &mut sd.levels {
            level.detail.iter_mut().for_each(|d| *d = 0.0);
        }
        let y = inverse_stationary_average(&sd).unwrap();
        let m = x.mean();
        for v in y.iter() {
            assert_abs_diff_eq!(*v, m, epsilon = 1e-12);
        }
    }

    #[test]
    fn matches_cycle_spinning_oracle_with_modified_details() {
        let x = random_signal(16, 11);
        let mut sd = forward_stationary(&x).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for level in &mut sd.levels {
            for d in &mut level.detail {
                if rng.random_bool(0.5) {
                    *d = 0.0;
                }
            }
        }
        let fast = inverse_stationary_average(&sd).unwrap();
        let slow = brute_force_average(&sd);
        assert!(max_abs_diff(&fast, &slow) < 1e-12);
    }

    #[test]
    fn means_agree_with_halves_of_windows() {
        let x = random_signal(16, 4);
        let means = stationary_means(&x).unwrap();
        for j in 0..=4 {
            for p in 0..16 {
                let len = 1usize << j;
                let direct: f64 = (0..len).map(|o| x[(p + o) % 16]).sum::<f64>() / len as f64;
                assert_abs_diff_eq!(means[j][p], direct, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn validate_rejects_bad_shapes() {
        let mut sd = forward_stationary(&random_signal(8, 0)).unwrap();
        sd.levels[1].detail.pop();
        assert!(matches!(inverse_stationary_average(&sd), Err(LrhError::Shape(_))));
    }
}
