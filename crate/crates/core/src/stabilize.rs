//! The likelihood ratio Haar transform G(X) and its exact inverse.
//!
//! G(X) is the standard Haar synthesis applied to (g_1, ..., g_J, s_{J,1}).
//! Its inverse recovers the data scale by scale: given a parent block mean
//! and the coefficient g, the two child means are the unique solution of a
//! monotone one-dimensional equation.

use crate::coeffs::{g_coefficient, lrh_forward, poisson_phi, HalfPairStats, LrhDecomposition, NoiseFamily};
use crate::error::{LrhError, Result};
use crate::haar::{forward_haar, inverse_haar};
use crate::signal::Signal;
use crate::stationary::{
    inverse_stationary_average, stationary_means, StationaryDecomposition, StationaryLevel,
};

const MAX_BISECTION_STEPS: usize = 200;

/// Relative slack above the Poisson supremum tolerated as rounding.
const SUPREMUM_SLACK: f64 = 1e-9;

/// Relative distance below the supremum treated as a zero child mean.
const BOUNDARY_SNAP: f64 = 1e-12;

/// One pair-inversion problem in block-mean units: the parent mean, the
/// coefficient to invert and the family. The solution (u, v) has mean equal
/// to the parent and sign(u - v) = sign(g).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairInversionProblem {
    pub parent_mean: f64,
    pub target: f64,
    pub j: usize,
    pub family: NoiseFamily,
}

/// Smallest x in [lo, hi] with f(x) >= target for an increasing f, to
/// relative precision. Stops after 200 halvings.
pub fn bisect_increasing<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, target: f64) -> f64 {
    #[cfg(debug_assertions)]
    {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..1000 {
            let x = lo + (hi - lo) * i as f64 / 999.0;
            let y = f(x);
            debug_assert!(y >= prev, "objective not increasing at {x}");
            prev = y;
        }
    }
    for _ in 0..MAX_BISECTION_STEPS {
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl PairInversionProblem {
    /// Solves for the child means (u, v). `k` only labels errors.
    pub fn solve(&self, k: usize) -> Result<(f64, f64)> {
        let m = self.parent_mean;
        let g = self.target;
        let j = self.j;
        let infeasible = |reason: String| LrhError::Infeasible { j, k, reason };
        if !g.is_finite() || !m.is_finite() {
            return Err(LrhError::domain(format!(
                "non-finite inputs at scale {j}, location {k}: mean {m}, g {g}"
            )));
        }
        let scaled = g * g / 2f64.powi(j as i32);
        match self.family {
            NoiseFamily::Poisson => {
                if m < 0.0 {
                    return Err(LrhError::domain(format!(
                        "negative Poisson block mean {m} at scale {j}, location {k}"
                    )));
                }
                if g == 0.0 {
                    return Ok((m, m));
                }
                if m == 0.0 {
                    return Err(infeasible("nonzero coefficient over an all-zero block".into()));
                }
                let level = scaled / m;
                let sup = poisson_phi(1.0);
                if level > sup * (1.0 + SUPREMUM_SLACK) {
                    return Err(infeasible(format!(
                        "|g| = {} exceeds the largest value {} attainable for block mean {m}",
                        g.abs(),
                        (2f64.powi(j as i32) * m * sup).sqrt()
                    )));
                }
                // snap to the boundary so a zero child mean is recovered exactly
                let delta = if level >= sup * (1.0 - BOUNDARY_SNAP) {
                    1.0
                } else {
                    bisect_increasing(poisson_phi, 0.0, 1.0, level)
                };
                let (big, small) = (m * (1.0 + delta), m * (1.0 - delta));
                Ok(if g > 0.0 { (big, small) } else { (small, big) })
            }
            NoiseFamily::ScaledChiSquared { m: dof } => {
                if dof == 0 {
                    return Err(LrhError::domain("chi-squared degrees of freedom must be >= 1"));
                }
                if m <= 0.0 {
                    return Err(LrhError::domain(format!(
                        "nonpositive chi-squared block mean {m} at scale {j}, location {k}"
                    )));
                }
                if g == 0.0 {
                    return Ok((m, m));
                }
                // -ln(1 - delta^2) = 2 g^2 / (2^j dof)
                let y = 2.0 * scaled / dof as f64;
                let one_minus_d2 = (-y).exp();
                let delta = (-(-y).exp_m1()).sqrt();
                let big = m * (1.0 + delta);
                let small = m * one_minus_d2 / (1.0 + delta);
                if !(small > 0.0) {
                    return Err(infeasible(format!(
                        "|g| = {} too large to represent a positive child mean",
                        g.abs()
                    )));
                }
                Ok(if g > 0.0 { (big, small) } else { (small, big) })
            }
            NoiseFamily::Gaussian { sigma } => {
                let diff = g * sigma * 2f64.powf(1.0 - j as f64 / 2.0);
                Ok((m + 0.5 * diff, m - 0.5 * diff))
            }
        }
    }
}

/// Recovers the child smooth coefficients (s_{j-1,2k-1}, s_{j-1,2k}) from
/// the parent smooth coefficient s_{j,k} and the LRH coefficient g_{j,k}.
pub fn invert_pair(s_parent: f64, g: f64, j: usize, fam: NoiseFamily) -> Result<(f64, f64)> {
    if j == 0 {
        return Err(LrhError::domain("scale index must be >= 1"));
    }
    let problem = PairInversionProblem {
        parent_mean: s_parent * 2f64.powf(-(j as f64) / 2.0),
        target: g,
        j,
        family: fam,
    };
    let (u, v) = problem.solve(1)?;
    let child = 2f64.powf((j as f64 - 1.0) / 2.0);
    Ok((u * child, v * child))
}

/// Exact inverse of [`lrh_forward`], applied from scale J down to 1.
pub fn lrh_inverse(d: &LrhDecomposition) -> Result<Signal> {
    d.validate()?;
    let big_j = d.num_scales();
    let mut means = vec![d.smooth_top * 2f64.powf(-(big_j as f64) / 2.0)];
    for j in (1..=big_j).rev() {
        let g = d.coefficients(j);
        let mut finer = Vec::with_capacity(means.len() * 2);
        for (k, (m, gk)) in means.iter().zip(g).enumerate() {
            let problem = PairInversionProblem { parent_mean: *m, target: *gk, j, family: d.family };
            let (u, v) = problem.solve(k + 1)?;
            finer.push(u);
            finer.push(v);
        }
        means = finer;
    }
    Signal::new(means)
}

/// G(X): standard Haar synthesis of the LRH coefficients.
pub fn stabilize(x: &Signal, fam: NoiseFamily) -> Result<Signal> {
    inverse_haar(&lrh_forward(x, fam)?.as_haar())
}

/// G^{-1}(Y): the Haar analysis of Y read as LRH coefficients, then inverted.
pub fn unstabilize(y: &Signal, fam: NoiseFamily) -> Result<Signal> {
    lrh_inverse(&LrhDecomposition::from_haar(forward_haar(y)?, fam))
}

/// G(x) - G(theta), elementwise.
pub fn stabilized_residual(x: &Signal, theta: &Signal, fam: NoiseFamily) -> Result<Signal> {
    if x.len() != theta.len() {
        return Err(LrhError::Shape(format!("length mismatch: {} vs {}", x.len(), theta.len())));
    }
    let gx = stabilize(x, fam)?;
    let gt = stabilize(theta, fam)?;
    Signal::new(gx.iter().zip(gt.iter()).map(|(a, b)| a - b).collect())
}

/// LRH coefficients at every scale and circular shift, stored in the detail
/// arrays of a stationary decomposition (smooth arrays hold the standard
/// stationary smooth coefficients).
pub fn lrh_forward_stationary(x: &Signal, fam: NoiseFamily) -> Result<StationaryDecomposition> {
    let big_j = x.levels()?;
    fam.check_signal(x)?;
    let n = x.len();
    let means = stationary_means(x)?;
    let mut levels = Vec::with_capacity(big_j);
    for j in 1..=big_j {
        let h = 1usize << (j - 1);
        let child = &means[j - 1];
        let detail = (0..n)
            .map(|p| g_coefficient(&HalfPairStats::new(child[p], child[(p + h) % n], j), fam))
            .collect::<Result<Vec<_>>>()?;
        let norm = 2f64.powf(j as f64 / 2.0);
        levels.push(StationaryLevel {
            scale: j,
            smooth: means[j].iter().map(|m| m * norm).collect(),
            detail,
        });
    }
    Ok(StationaryDecomposition { n, levels })
}

/// Translation-invariant G(X): average-basis synthesis of the stationary
/// LRH coefficients, i.e. G averaged over all cyclic shifts.
pub fn stabilize_ti(x: &Signal, fam: NoiseFamily) -> Result<Signal> {
    inverse_stationary_average(&lrh_forward_stationary(x, fam)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::g_poisson;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_coefficient_splits_evenly() {
        for fam in [NoiseFamily::Poisson, NoiseFamily::ScaledChiSquared { m: 1 }] {
            let (l, r) = invert_pair(3.0, 0.0, 2, fam).unwrap();
            assert_abs_diff_eq!(l, 3.0 / 2f64.sqrt(), epsilon = 1e-15);
            assert_eq!(l, r);
        }
    }

    #[test]
    fn two_point_roundtrip() {
        let x = Signal::new(vec![2.0, 0.0]).unwrap();
        let d = lrh_forward(&x, NoiseFamily::Poisson).unwrap();
        let (l, r) = invert_pair(d.smooth_top, d.coefficients(1)[0], 1, NoiseFamily::Poisson).unwrap();
        assert_abs_diff_eq!(l, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn recovers_half_means_two_one() {
        let g = g_poisson(&HalfPairStats::new(2.0, 1.0, 1)).unwrap();
        assert_abs_diff_eq!(g, 0.582922, epsilon = 5e-7);
        let problem =
            PairInversionProblem { parent_mean: 1.5, target: g, j: 1, family: NoiseFamily::Poisson };
        let (u, v) = problem.solve(1).unwrap();
        assert_abs_diff_eq!(u, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn inversion_reproduces_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..2000 {
            let j = rng.random_range(1..12);
            let u: f64 = rng.random_range(0.0..40.0);
            let v: f64 = if rng.random_bool(0.1) { 0.0 } else { rng.random_range(1e-6..40.0) };
            for fam in [
                NoiseFamily::Poisson,
                NoiseFamily::ScaledChiSquared { m: 3 },
                NoiseFamily::Gaussian { sigma: 2.0 },
            ] {
                if fam.check_value(u).is_err() || fam.check_value(v).is_err() {
                    continue;
                }
                let g = g_coefficient(&HalfPairStats::new(u, v, j), fam).unwrap();
                let m = 0.5 * (u + v);
                let (uu, vv) =
                    PairInversionProblem { parent_mean: m, target: g, j, family: fam }.solve(1).unwrap();
                assert!(((uu + vv) - (u + v)).abs() <= 1e-12 * (u + v).max(1e-300));
                let g2 = g_coefficient(&HalfPairStats::new(uu, vv, j), fam).unwrap();
                assert!((g2 - g).abs() <= 1e-9 * g.abs().max(1e-12), "{fam} u={u} v={v} g={g} g2={g2}");
            }
        }
    }

    #[test]
    fn larger_value_gives_larger_coefficient() {
        let mut prev = -1.0;
        for a in [1.0, 2.0, 4.0, 8.0, 16.0] {
            let g = g_poisson(&HalfPairStats::new(a, 1.0, 1)).unwrap();
            assert!(g > prev);
            prev = g;
        }
    }

    #[test]
    fn infeasible_poisson_pair() {
        // sup over the bracket is sqrt(2 m 2 ln 2) at j = 1
        let m = 1.0;
        let sup = (2.0 * m * 2.0 * 2f64.ln()).sqrt();
        let err =
            PairInversionProblem { parent_mean: m, target: sup * 1.01, j: 1, family: NoiseFamily::Poisson }
                .solve(7)
                .unwrap_err();
        assert!(matches!(err, LrhError::Infeasible { j: 1, k: 7, .. }));
        let (u, v) =
            PairInversionProblem { parent_mean: m, target: -sup, j: 1, family: NoiseFamily::Poisson }
                .solve(1)
                .unwrap();
        assert_eq!((u, v), (0.0, 2.0));
        assert!(invert_pair(0.0, 1.0, 1, NoiseFamily::Poisson).is_err());
        assert!(matches!(invert_pair(-1.0, 0.0, 1, NoiseFamily::Poisson), Err(LrhError::Domain(_))));
        assert!(matches!(
            invert_pair(-1.0, 0.0, 1, NoiseFamily::ScaledChiSquared { m: 1 }),
            Err(LrhError::Domain(_))
        ));
        assert!(matches!(
            invert_pair(1.0, 1e4, 1, NoiseFamily::ScaledChiSquared { m: 1 }),
            Err(LrhError::Infeasible { .. })
        ));
    }

    #[test]
    fn inverse_of_constant_coefficients() {
        let mut d = lrh_forward(&Signal::constant(1.0, 8).unwrap(), NoiseFamily::Poisson).unwrap();
        d.smooth_top = 2f64.powf(1.5) * 3.25;
        let x = lrh_inverse(&d).unwrap();
        for v in x.iter() {
            assert_abs_diff_eq!(*v, 3.25, epsilon = 1e-14);
        }
    }

    #[test]
    fn infeasible_error_names_location() {
        let x = Signal::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let mut d = lrh_forward(&x, NoiseFamily::Poisson).unwrap();
        d.coefficients_mut(1)[1] = 0.5;
        assert!(matches!(lrh_inverse(&d), Err(LrhError::Infeasible { j: 1, k: 2, .. })));
    }

    #[test]
    fn roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let counts = Signal::new((0..1024).map(|_| rng.random_range(0..12) as f64).collect()).unwrap();
        let back = lrh_inverse(&lrh_forward(&counts, NoiseFamily::Poisson).unwrap()).unwrap();
        let err = back.iter().zip(counts.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");

        let pos = Signal::new((0..256).map(|_| rng.random_range(1e-3..20.0)).collect()).unwrap();
        let fam = NoiseFamily::ScaledChiSquared { m: 2 };
        let back = lrh_inverse(&lrh_forward(&pos, fam).unwrap()).unwrap();
        let err = back.iter().zip(pos.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");

        let y = stabilize(&pos, fam).unwrap();
        let back = unstabilize(&y, fam).unwrap();
        let err = back.iter().zip(pos.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn residual_of_identical_inputs_is_zero() {
        let x = Signal::new(vec![1.0, 4.0, 2.0, 0.0]).unwrap();
        let r = stabilized_residual(&x, &x, NoiseFamily::Poisson).unwrap();
        assert!(r.iter().all(|v| *v == 0.0));
        let short = Signal::new(vec![1.0, 2.0]).unwrap();
        assert!(stabilized_residual(&x, &short, NoiseFamily::Poisson).is_err());
    }

    #[test]
    fn gaussian_stabilize_is_scaling() {
        let x = Signal::new(vec![1.0, -4.0, 2.0, 0.5]).unwrap();
        let y = stabilize(&x, NoiseFamily::Gaussian { sigma: 2.0 }).unwrap();
        // details are divided by sigma, the mean level is untouched
        let h = forward_haar(&y).unwrap();
        let hx = forward_haar(&x).unwrap();
        for j in 1..=2 {
            for (a, b) in h.detail(j).iter().zip(hx.detail(j)) {
                assert_abs_diff_eq!(*a, b / 2.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn ti_stabilize_of_constant_is_constant() {
        let y = stabilize_ti(&Signal::constant(5.0, 32).unwrap(), NoiseFamily::Poisson).unwrap();
        for v in y.iter() {
            assert_abs_diff_eq!(*v, 5.0, epsilon = 1e-12);
        }
    }
}
