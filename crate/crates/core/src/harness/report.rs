//! JSON reports and their CSV sidecars (histogram bins, box-plot
//! summaries, Q-Q points, autocorrelations).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::harness::{CoeffStudyReport, MseStudyReport, StabStudyReport};
use crate::signal::format_g17;
use crate::stats::Histogram;

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes a header line and comma-separated rows.
pub fn write_table<W: Write>(mut w: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn sidecar(base: &Path, suffix: &str) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    base.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn write_sidecar(base: &Path, suffix: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
    let path = sidecar(base, suffix);
    write_table(BufWriter::new(File::create(&path)?), header, rows)?;
    Ok(path)
}

fn histogram_rows(h: &Histogram) -> Vec<Vec<String>> {
    h.counts
        .iter()
        .enumerate()
        .map(|(i, c)| vec![format_g17(h.edges[i]), format_g17(h.edges[i + 1]), c.to_string()])
        .collect()
}

pub fn coeff_sidecars(r: &CoeffStudyReport, base: &Path) -> Result<Vec<PathBuf>> {
    let samples: Vec<Vec<String>> =
        r.g.iter()
            .zip(&r.f)
            .enumerate()
            .map(|(i, (g, f))| vec![i.to_string(), format_g17(*g), format_g17(*f)])
            .collect();
    Ok(vec![
        write_sidecar(base, "diff_hist", &["lo", "hi", "count"], &histogram_rows(&r.diff_histogram))?,
        write_sidecar(base, "samples", &["replication", "g", "f"], &samples)?,
    ])
}

pub fn mse_sidecars(r: &MseStudyReport, base: &Path) -> Result<Vec<PathBuf>> {
    let rows: Vec<Vec<String>> = r
        .cells
        .iter()
        .map(|c| {
            let s = c.summary;
            vec![
                c.model.to_string(),
                c.statistic.to_string(),
                format_g17(s.min),
                format_g17(s.q1),
                format_g17(s.median),
                format_g17(s.q3),
                format_g17(s.max),
                format_g17(c.mean_mse),
                format_g17(c.standard_error),
            ]
        })
        .collect();
    Ok(vec![write_sidecar(
        base,
        "boxplot",
        &["model", "statistic", "min", "q1", "median", "q3", "max", "mean", "se"],
        &rows,
    )?])
}

pub fn stab_sidecars(r: &StabStudyReport, base: &Path) -> Result<Vec<PathBuf>> {
    let qq: Vec<Vec<String>> = r.qq.iter().map(|(t, e)| vec![format_g17(*t), format_g17(*e)]).collect();
    let acf: Vec<Vec<String>> = r
        .acf_res
        .iter()
        .zip(&r.acf_res_sq)
        .enumerate()
        .map(|(k, (a, b))| vec![k.to_string(), format_g17(*a), format_g17(*b)])
        .collect();
    let residual: Vec<Vec<String>> =
        r.residual.iter().enumerate().map(|(i, v)| vec![i.to_string(), format_g17(*v)]).collect();
    Ok(vec![
        write_sidecar(base, "qq", &["theoretical", "empirical"], &qq)?,
        write_sidecar(base, "acf", &["lag", "acf_residual", "acf_residual_sq"], &acf)?,
        write_sidecar(base, "residual", &["index", "residual"], &residual)?,
    ])
}
