//! Real-valued signals and their single-column CSV / JSON array encodings.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{LrhError, Result};

/// A finite real-valued sequence. Transform entry points additionally require
/// the length to be a power of two, see [`Signal::levels`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Signal(Vec<f64>);

impl Signal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(LrhError::Shape("empty signal".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(LrhError::domain(format!("non-finite value {} at index {i}", values[i])));
        }
        Ok(Signal(values))
    }

    pub fn constant(value: f64, n: usize) -> Result<Self> {
        Signal::new(vec![value; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Number of dyadic levels J, where the length is n = 2^J with J >= 1.
    pub fn levels(&self) -> Result<usize> {
        dyadic_levels(self.0.len())
    }

    /// Circular rotation to the left: `out[i] = self[(i + shift) mod n]`.
    pub fn rotate_left(&self, shift: usize) -> Signal {
        let mut v = self.0.clone();
        let n = v.len();
        v.rotate_left(shift % n);
        Signal(v)
    }

    pub fn rotate_right(&self, shift: usize) -> Signal {
        let mut v = self.0.clone();
        let n = v.len();
        v.rotate_right(shift % n);
        Signal(v)
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut values = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let field = line.trim();
            if field.is_empty() {
                continue;
            }
            let v: f64 = field.parse().map_err(|_| LrhError::Parse {
                row: i + 1,
                msg: format!("cannot parse {field:?} as a number"),
            })?;
            values.push(v);
        }
        Signal::new(values)
    }

    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        let mut buf = String::with_capacity(self.0.len() * 24);
        for v in &self.0 {
            buf.push_str(&format_g17(*v));
            buf.push('\n');
        }
        writer.write_all(buf.as_bytes())?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.0)?)
    }
}

impl Deref for Signal {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Signal {
    type Error = LrhError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Signal::new(values)
    }
}

impl From<Signal> for Vec<f64> {
    fn from(s: Signal) -> Self {
        s.0
    }
}

/// Returns J for n = 2^J, J >= 1.
pub fn dyadic_levels(n: usize) -> Result<usize> {
    if n < 2 || !n.is_power_of_two() {
        return Err(LrhError::Length { len: n });
    }
    Ok(n.trailing_zeros() as usize)
}

/// Formats a float with 17 significant digits in the style of C's `%.17g`.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        let fixed = format!("{x:.decimals$}");
        trim_fraction(&fixed).to_string()
    } else {
        let mut out = trim_fraction(mantissa).to_string();
        let _ = write!(out, "e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
        out
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
