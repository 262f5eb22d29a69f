//! Seeded noise samplers for the Poisson and scaled chi-squared models.
//!
//! Every random stream is a ChaCha8 generator keyed by a 64-bit master seed
//! with a 64-bit stream number; replication i of an experiment uses stream
//! i, so results do not depend on execution order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::coeffs::NoiseFamily;
use crate::error::{LrhError, Result};
use crate::signal::Signal;

pub const RNG_ALGORITHM: &str =
    "ChaCha8 (rand_chacha 0.9), seed_from_u64(master) with stream = substream index";
pub const POISSON_ALGORITHM: &str =
    "sequential-search inversion for lambda < 30; PTRS transformed rejection (Hormann 1993) for lambda >= 30";
pub const GAMMA_ALGORITHM: &str =
    "Gamma(m/2, scale 2 sigma^2/m) via rand_distr 0.5 (Marsaglia-Tsang; small-shape boost), exact zeros redrawn";

/// Below this mean the Poisson sampler inverts the CDF directly.
pub const POISSON_INVERSION_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent stream `stream` derived from this master seed.
    pub fn substream(self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }
}

/// One Poisson(lambda) draw.
pub fn poisson_draw<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    if lambda < POISSON_INVERSION_LIMIT {
        poisson_inversion(lambda, rng)
    } else {
        poisson_ptrs(lambda, rng)
    }
}

fn poisson_inversion<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    loop {
        let u: f64 = rng.random();
        let mut k = 0u64;
        let mut p = (-lambda).exp();
        let mut cdf = p;
        while u > cdf {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
            if p == 0.0 && k as f64 > lambda {
                break;
            }
        }
        if u <= cdf {
            return k;
        }
        // u fell in the rounding gap above the accumulated cdf; redraw
    }
}

fn poisson_ptrs<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let invalpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u: f64 = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + invalpha.ln() - (a / (us * us) + b).ln() <= -lambda + k * loglam - ln_gamma(k + 1.0) {
            return k as u64;
        }
    }
}

/// Independent Poisson draws with the given intensities.
pub fn sample_poisson_with<R: Rng + ?Sized>(lambda: &[f64], rng: &mut R) -> Result<Signal> {
    if let Some(i) = lambda.iter().position(|l| !(*l >= 0.0)) {
        return Err(LrhError::domain(format!("negative intensity {} at index {i}", lambda[i])));
    }
    Signal::new(lambda.iter().map(|l| poisson_draw(*l, rng) as f64).collect())
}

pub fn sample_poisson(lambda: &Signal, seed: RngSeed) -> Result<Signal> {
    sample_poisson_with(lambda, &mut seed.rng())
}

/// Independent sigma^2 m^{-1} chi^2_m draws, i.e. Gamma(m/2, rate m/(2 sigma^2)).
pub fn sample_scaled_chisq_with<R: Rng + ?Sized>(sigma2: &[f64], m: u32, rng: &mut R) -> Result<Signal> {
    if m == 0 {
        return Err(LrhError::domain("degrees of freedom must be >= 1"));
    }
    if let Some(i) = sigma2.iter().position(|s| !(*s > 0.0)) {
        return Err(LrhError::domain(format!("nonpositive variance {} at index {i}", sigma2[i])));
    }
    let shape = m as f64 / 2.0;
    let unit = Gamma::new(shape, 1.0).map_err(|e| LrhError::domain(e.to_string()))?;
    let values = sigma2
        .iter()
        .map(|s2| loop {
            let x: f64 = unit.sample(rng) * 2.0 * s2 / m as f64;
            if x > 0.0 {
                break x;
            }
        })
        .collect();
    Signal::new(values)
}

pub fn sample_scaled_chisq(sigma2: &Signal, m: u32, seed: RngSeed) -> Result<Signal> {
    sample_scaled_chisq_with(sigma2, m, &mut seed.rng())
}

/// One draw per element of `theta` from the family: Poisson(theta),
/// theta * chi^2_m / m, or theta + sigma * N(0,1).
pub fn sample_family_with<R: Rng + ?Sized>(theta: &[f64], fam: NoiseFamily, rng: &mut R) -> Result<Signal> {
    fam.validate()?;
    match fam {
        NoiseFamily::Poisson => sample_poisson_with(theta, rng),
        NoiseFamily::ScaledChiSquared { m } => sample_scaled_chisq_with(theta, m, rng),
        NoiseFamily::Gaussian { sigma } => Signal::new(
            theta
                .iter()
                .map(|t| {
                    let z: f64 = StandardNormal.sample(rng);
                    t + sigma * z
                })
                .collect(),
        ),
    }
}

pub fn sample_family(theta: &Signal, fam: NoiseFamily, seed: RngSeed) -> Result<Signal> {
    sample_family_with(theta, fam, &mut seed.rng())
}
