//! Donoho–Johnstone `blocks` and `bumps` test functions, affinely rescaled
//! to a prescribed (min, max).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LrhError, Result};
use crate::signal::{dyadic_levels, Signal};

const POSITIONS: [f64; 11] = [0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81];
const BLOCK_HEIGHTS: [f64; 11] = [4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2];
const BUMP_HEIGHTS: [f64; 11] = [4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2];
const BUMP_WIDTHS: [f64; 11] = [0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Blocks,
    Bumps,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Blocks => "blocks",
            Shape::Bumps => "bumps",
        })
    }
}

impl FromStr for Shape {
    type Err = LrhError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "blocks" => Ok(Shape::Blocks),
            "bumps" => Ok(Shape::Bumps),
            _ => Err(LrhError::domain(format!("unknown test signal {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestSignalSpec {
    pub shape: Shape,
    pub n: usize,
    pub target_min: f64,
    pub target_max: f64,
}

/// Raw blocks function: right-continuous steps, so the value at a knot is
/// the value after the jump.
pub fn blocks_raw(t: f64) -> f64 {
    POSITIONS.iter().zip(BLOCK_HEIGHTS).map(|(p, h)| if t >= *p { h } else { 0.0 }).sum()
}

pub fn bumps_raw(t: f64) -> f64 {
    POSITIONS
        .iter()
        .zip(BUMP_HEIGHTS.iter().zip(BUMP_WIDTHS))
        .map(|(p, (h, w))| h * (1.0 + ((t - p) / w).abs()).powi(-4))
        .sum()
}

/// Evaluates the shape on the grid t_i = i/n, i = 1..=n, and maps it
/// affinely onto [target_min, target_max]; both extremes are hit exactly.
pub fn make_signal(spec: &TestSignalSpec) -> Result<Signal> {
    dyadic_levels(spec.n)?;
    if !(spec.target_min < spec.target_max) || !spec.target_max.is_finite() || !spec.target_min.is_finite() {
        return Err(LrhError::domain(format!(
            "need target_min < target_max, got ({}, {})",
            spec.target_min, spec.target_max
        )));
    }
    let f = match spec.shape {
        Shape::Blocks => blocks_raw,
        Shape::Bumps => bumps_raw,
    };
    let raw: Vec<f64> = (1..=spec.n).map(|i| f(i as f64 / spec.n as f64)).collect();
    let lo = raw.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(LrhError::domain("raw test signal is constant and cannot be rescaled"));
    }
    let values = raw
        .iter()
        .map(|r| {
            let w = (r - lo) / (hi - lo);
            spec.target_min * (1.0 - w) + spec.target_max * w
        })
        .collect();
    Signal::new(values)
}
