//! Loading a column of event counts from CSV and smoothing it.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coeffs::NoiseFamily;
use crate::denoise::{denoise_ti, DenoiseConfig, Variant};
use crate::error::{LrhError, Result};
use crate::signal::{dyadic_levels, format_g17, Signal};

/// Which CSV column holds the counts: a 0-based index or a header name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnSpec {
    Index(usize),
    Name(String),
}

impl FromStr for ColumnSpec {
    type Err = LrhError;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(LrhError::domain("empty column spec"));
        }
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSpec::Index(i),
            Err(_) => ColumnSpec::Name(s.to_string()),
        })
    }
}

/// How to cut a non-dyadic series down to dyadic length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Windowing {
    /// Length must already be a power of two.
    Exact,
    /// Half-open row range [start, end) of the data rows.
    Window { start: usize, end: usize },
    /// Keep the leading 2^floor(log2 len) rows.
    Truncate,
}

impl FromStr for Windowing {
    type Err = LrhError;

    /// Parses "a:b".
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| LrhError::domain(format!("window must look like start:end, got {s:?}")))?;
        let parse = |t: &str| {
            t.trim().parse::<usize>().map_err(|_| LrhError::domain(format!("bad window bound {t:?}")))
        };
        Ok(Windowing::Window { start: parse(a)?, end: parse(b)? })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountSeries {
    pub counts: Vec<u64>,
    /// Header of the count column, if the file had one.
    pub label: Option<String>,
    /// Index of the first kept data row within the file's data rows.
    pub offset: usize,
}

impl CountSeries {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        dyadic_levels(counts.len())?;
        Ok(CountSeries { counts, label: None, offset: 0 })
    }

    pub fn to_signal(&self) -> Result<Signal> {
        Signal::new(self.counts.iter().map(|c| *c as f64).collect())
    }
}

fn parse_count(field: &str, row: usize) -> Result<u64> {
    let t = field.trim();
    let value: f64 = t.parse().map_err(|_| LrhError::Parse { row, msg: format!("{t:?} is not a number") })?;
    if !value.is_finite() || value.fract() != 0.0 {
        return Err(LrhError::Parse { row, msg: format!("{t:?} is not an integer count") });
    }
    if value < 0.0 {
        return Err(LrhError::Parse { row, msg: format!("negative count {t}") });
    }
    Ok(value as u64)
}

/// Reads counts from CSV text. Rows are numbered from 1 as lines in the
/// file. With an index spec a first row whose count field is not numeric is
/// taken as a header; a name spec requires a header.
pub fn read_counts<R: Read>(reader: R, column: &ColumnSpec, windowing: Windowing) -> Result<CountSeries> {
    let mut rdr =
        csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let mut records = rdr.records().peekable();
    let mut label = None;
    let idx = match column {
        ColumnSpec::Name(name) => {
            let header =
                records.next().ok_or_else(|| LrhError::Parse { row: 1, msg: "empty file".into() })??;
            let i = header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| LrhError::Parse { row: 1, msg: format!("no column named {name:?}") })?;
            label = Some(name.clone());
            i
        }
        ColumnSpec::Index(i) => {
            if let Some(Ok(first)) = records.peek() {
                if let Some(field) = first.get(*i) {
                    if field.trim().parse::<f64>().is_err() {
                        label = Some(field.to_string());
                        records.next();
                    }
                }
            }
            *i
        }
    };
    let mut counts = Vec::new();
    for rec in records {
        let rec = rec?;
        let row = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let field =
            rec.get(idx).ok_or_else(|| LrhError::Parse { row, msg: format!("missing column {idx}") })?;
        counts.push(parse_count(field, row)?);
    }
    let (offset, kept) = match windowing {
        Windowing::Exact => (0, counts),
        Windowing::Window { start, end } => {
            if start >= end || end > counts.len() {
                return Err(LrhError::domain(format!(
                    "window {start}:{end} does not fit {} data rows",
                    counts.len()
                )));
            }
            (start, counts[start..end].to_vec())
        }
        Windowing::Truncate => {
            if counts.len() < 2 {
                return Err(LrhError::Length { len: counts.len() });
            }
            let keep = 1usize << (usize::BITS - 1 - counts.len().leading_zeros());
            counts.truncate(keep);
            (0, counts)
        }
    };
    dyadic_levels(kept.len())?;
    Ok(CountSeries { counts: kept, label, offset })
}

pub fn load_counts(path: &Path, column: &ColumnSpec, windowing: Windowing) -> Result<CountSeries> {
    read_counts(BufReader::new(File::open(path)?), column, windowing)
}

/// Translation-invariant LRH smoothing of the counts under the Poisson
/// model; the variant in `cfg` is ignored.
pub fn denoise_counts(cs: &CountSeries, cfg: &DenoiseConfig) -> Result<Signal> {
    if cfg.family != NoiseFamily::Poisson {
        return Err(LrhError::domain(format!(
            "count smoothing needs the poisson family, got {}",
            cfg.family
        )));
    }
    denoise_ti(&cs.to_signal()?, &cfg.with_variant(Variant::TranslationInvariant))
}

/// Two-column CSV "count,estimate".
pub fn write_count_estimate<W: Write>(cs: &CountSeries, estimate: &Signal, mut w: W) -> Result<()> {
    if estimate.len() != cs.counts.len() {
        return Err(LrhError::Shape(format!(
            "estimate has {} values for {} counts",
            estimate.len(),
            cs.counts.len()
        )));
    }
    writeln!(w, "count,estimate")?;
    for (c, e) in cs.counts.iter().zip(estimate.iter()) {
        writeln!(w, "{c},{}", format_g17(*e))?;
    }
    Ok(())
}
