//! Likelihood ratio Haar (LRH) coefficients for Poisson and scaled
//! chi-squared signals, the induced variance-stabilizing transform, and
//! thresholding denoisers built on it.
//!
//! Scales are 1-based with `j = 1` the finest; locations within a scale are
//! 1-based in error messages and 0-based in slices.

pub mod coeffs;
pub mod denoise;
pub mod error;
pub mod haar;
pub mod harness;
pub mod models;
pub mod plot;
pub mod sampling;
pub mod signal;
pub mod stabilize;
pub mod stationary;
pub mod stats;

pub use coeffs::{f_coefficient, g_coefficient, lrh_forward, HalfPairStats, LrhDecomposition, NoiseFamily};
pub use denoise::{denoise, universal_threshold, DenoiseConfig, Statistic, Variant};
pub use error::{LrhError, Result};
pub use haar::{forward_haar, inverse_haar, local_means, HaarDecomposition};
pub use models::{make_signal, Shape, TestSignalSpec};
pub use sampling::{sample_family, sample_poisson, sample_scaled_chisq, RngSeed};
pub use signal::Signal;
pub use stabilize::{lrh_inverse, stabilize, unstabilize};
pub use stationary::{forward_stationary, inverse_stationary_average, StationaryDecomposition};
