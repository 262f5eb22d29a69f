use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lrh::coeffs::LrhDecomposition;
use lrh::denoise::{DenoiseConfig, Statistic, Variant};
use lrh::harness::report::{coeff_sidecars, mse_sidecars, stab_sidecars, write_json};
use lrh::harness::{
    coeff_study, counts::write_count_estimate, denoise_counts, load_counts, mse_study, stabilization_study,
    CoeffStudySpec, ColumnSpec, MseStudyConfig, SimModel, StabVariant, Windowing,
};
use lrh::plot::{render_svg, PlotKind, Series};
use lrh::signal::format_g17;
use lrh::stabilize::{lrh_forward_stationary, stabilize_ti};
use lrh::{
    denoise, forward_haar, forward_stationary, inverse_haar, inverse_stationary_average, lrh_forward,
    lrh_inverse, make_signal, sample_family, stabilize, universal_threshold, unstabilize, HaarDecomposition,
    LrhError, NoiseFamily, RngSeed, Shape, Signal, StationaryDecomposition, TestSignalSpec,
};

const DEFAULT_SEED: u64 = 12345;

#[derive(Parser)]
#[command(name = "lrh", version, about = "Likelihood ratio Haar smoothing and variance stabilization")]
struct Cli {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for Monte-Carlo replications.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Output file (stdout when omitted). Study sidecars are written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Format for signal output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Rescaled blocks or bumps test signal.
    MakeSignal {
        #[arg(long)]
        shape: Shape,
        #[arg(long, default_value_t = 2048)]
        n: usize,
        #[arg(long)]
        min: f64,
        #[arg(long)]
        max: f64,
    },
    /// Noisy observations around a mean signal.
    Sample {
        #[arg(long)]
        family: NoiseFamily,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Forward or inverse transform of a signal.
    Transform {
        #[arg(long, value_enum, default_value_t = TransformKind::Haar)]
        kind: TransformKind,
        /// Needed for the likelihood ratio transforms.
        #[arg(long)]
        family: Option<NoiseFamily>,
        /// Read a decomposition (JSON) and reconstruct the signal.
        #[arg(long)]
        inverse: bool,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// G(X): Haar synthesis of the likelihood ratio coefficients.
    Stabilize {
        #[arg(long)]
        family: NoiseFamily,
        #[arg(long, default_value = "dec")]
        variant: Variant,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Exact inverse of the decimated G.
    Unstabilize {
        #[arg(long)]
        family: NoiseFamily,
        #[arg(long = "in")]
        input: PathBuf,
    },
    Denoise {
        #[arg(long)]
        family: NoiseFamily,
        #[command(flatten)]
        smoothing: SmoothingArgs,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Sampling distribution of g and f for two fixed half-block means.
    CoeffStudy {
        #[arg(long)]
        family: NoiseFamily,
        #[arg(long, default_value_t = 2)]
        j: usize,
        #[arg(long)]
        left: f64,
        #[arg(long)]
        right: f64,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
    },
    /// Mean squared error of both smoothers on the simulation models.
    MseStudy {
        #[arg(long, value_delimiter = ',', default_value = "1a,1b,2a,2b")]
        models: Vec<SimModel>,
        #[arg(long, value_delimiter = ',', default_value = "lrh,fisz")]
        statistics: Vec<Statistic>,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = 2048)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        j0: usize,
        #[arg(long, default_value = "ti")]
        variant: Variant,
        #[arg(long, default_value = "universal")]
        threshold: ThresholdArg,
    },
    /// Normality and autocorrelation of G(X) - G(Theta) on one realization.
    StabStudy {
        #[arg(long, default_value = "1a")]
        model: SimModel,
        #[arg(long, default_value = "ti")]
        variant: StabVariant,
        #[arg(long, default_value_t = 2048)]
        n: usize,
    },
    /// Smooth a column of counts; writes "count,estimate" CSV.
    DenoiseCounts {
        #[arg(long = "in")]
        input: PathBuf,
        /// 0-based column index or header name.
        #[arg(long, default_value = "0")]
        column: ColumnSpec,
        /// Half-open data-row range start:end.
        #[arg(long, conflicts_with = "truncate")]
        window: Option<Windowing>,
        /// Keep the longest dyadic prefix.
        #[arg(long)]
        truncate: bool,
        #[command(flatten)]
        smoothing: SmoothingArgs,
        /// Also write a JSON report with the configuration.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// SVG chart of CSV columns (first column is x unless --index-x).
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = PlotKindArg::Line)]
        kind: PlotKindArg,
        #[arg(long, default_value = "")]
        title: String,
        /// Use the row number as x and plot every column.
        #[arg(long)]
        index_x: bool,
    },
}

#[derive(Args)]
struct SmoothingArgs {
    #[arg(long, default_value = "lrh")]
    statistic: Statistic,
    #[arg(long, default_value = "universal")]
    threshold: ThresholdArg,
    #[arg(long, default_value_t = 0)]
    j0: usize,
    #[arg(long, default_value = "ti")]
    variant: Variant,
}

impl SmoothingArgs {
    fn config(&self, n: usize, family: NoiseFamily) -> lrh::Result<DenoiseConfig> {
        Ok(DenoiseConfig {
            threshold: self.threshold.value(n)?,
            j0: self.j0,
            variant: self.variant,
            family,
            statistic: self.statistic,
        })
    }
}

#[derive(Clone, Copy)]
enum ThresholdArg {
    Universal,
    Fixed(f64),
}

impl ThresholdArg {
    fn value(self, n: usize) -> lrh::Result<f64> {
        match self {
            ThresholdArg::Universal => universal_threshold(n),
            ThresholdArg::Fixed(t) => Ok(t),
        }
    }
}

impl std::str::FromStr for ThresholdArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("universal") {
            return Ok(ThresholdArg::Universal);
        }
        match s.parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(ThresholdArg::Fixed(t)),
            _ => Err(format!("threshold must be 'universal' or a positive number, got {s:?}")),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TransformKind {
    Haar,
    Lrh,
    Stationary,
    LrhStationary,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotKindArg {
    Line,
    Scatter,
}

fn exit_code(e: &LrhError) -> u8 {
    match e {
        LrhError::Infeasible { .. } => 4,
        LrhError::Internal(_) => 1,
        _ => 3,
    }
}

fn read_input(path: &Path) -> lrh::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn is_json(path: &Path, text: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) || text.trim_start().starts_with('[')
}

fn read_signal(path: &Path) -> lrh::Result<Signal> {
    let text = read_input(path)?;
    if is_json(path, &text) {
        Signal::from_json(&text)
    } else {
        Signal::read_csv(text.as_bytes())
    }
}

struct Output {
    out: Option<PathBuf>,
    format: Format,
}

impl Output {
    fn writer(&self) -> lrh::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn signal(&self, s: &Signal) -> lrh::Result<()> {
        let mut w = self.writer()?;
        match self.format {
            Format::Csv => s.write_csv(&mut w)?,
            Format::Json => writeln!(w, "{}", s.to_json()?)?,
        }
        w.flush()?;
        Ok(())
    }

    fn json<T: Serialize>(&self, value: &T) -> lrh::Result<()> {
        match &self.out {
            Some(p) => write_json(value, p),
            None => {
                let mut w = self.writer()?;
                serde_json::to_writer_pretty(&mut w, value)?;
                writeln!(w)?;
                w.flush()?;
                Ok(())
            }
        }
    }

    fn text(&self, s: &str) -> lrh::Result<()> {
        let mut w = self.writer()?;
        w.write_all(s.as_bytes())?;
        w.flush()?;
        Ok(())
    }

    fn announce(&self, paths: &[PathBuf]) {
        for p in paths {
            eprintln!("wrote {}", p.display());
        }
    }
}

/// Long-format CSV of a decomposition: kind, scale, location, value.
fn decomposition_rows(levels: &[(usize, &[f64])], smooth: &[(usize, &[f64])]) -> String {
    let mut s = String::from("kind,scale,location,value\n");
    for (kind, rows) in [("detail", levels), ("smooth", smooth)] {
        for (j, values) in rows {
            for (k, v) in values.iter().enumerate() {
                s.push_str(&format!("{kind},{j},{},{}\n", k + 1, format_g17(*v)));
            }
        }
    }
    s
}

fn transform(
    kind: TransformKind,
    family: Option<NoiseFamily>,
    inverse: bool,
    input: &Path,
    out: &Output,
) -> lrh::Result<()> {
    let need_family = || {
        family.ok_or_else(|| LrhError::Domain("--family is required for likelihood ratio transforms".into()))
    };
    if inverse {
        let text = read_input(input)?;
        let signal = match kind {
            TransformKind::Haar => inverse_haar(&serde_json::from_str::<HaarDecomposition>(&text)?)?,
            TransformKind::Lrh => {
                let mut d: LrhDecomposition = serde_json::from_str(&text)?;
                if let Some(f) = family {
                    d.family = f;
                }
                lrh_inverse(&d)?
            }
            TransformKind::Stationary | TransformKind::LrhStationary => {
                let d: StationaryDecomposition = serde_json::from_str(&text)?;
                if kind == TransformKind::LrhStationary {
                    return Err(LrhError::Domain(
                        "the stationary likelihood ratio decomposition has no exact inverse; use stabilize --variant ti".into(),
                    ));
                }
                inverse_stationary_average(&d)?
            }
        };
        return out.signal(&signal);
    }
    let x = read_signal(input)?;
    match kind {
        TransformKind::Haar => {
            let h = forward_haar(&x)?;
            match out.format {
                Format::Json => out.json(&h),
                Format::Csv => {
                    let levels: Vec<(usize, &[f64])> =
                        h.levels.iter().map(|l| (l.scale, &l.coefficients[..])).collect();
                    let top = [h.smooth_top];
                    out.text(&decomposition_rows(&levels, &[(h.num_scales(), &top[..])]))
                }
            }
        }
        TransformKind::Lrh => {
            let d = lrh_forward(&x, need_family()?)?;
            match out.format {
                Format::Json => out.json(&d),
                Format::Csv => {
                    let levels: Vec<(usize, &[f64])> =
                        d.levels.iter().map(|l| (l.scale, &l.coefficients[..])).collect();
                    let top = [d.smooth_top];
                    out.text(&decomposition_rows(&levels, &[(d.num_scales(), &top[..])]))
                }
            }
        }
        TransformKind::Stationary | TransformKind::LrhStationary => {
            let d = if kind == TransformKind::Stationary {
                forward_stationary(&x)?
            } else {
                lrh_forward_stationary(&x, need_family()?)?
            };
            match out.format {
                Format::Json => out.json(&d),
                Format::Csv => {
                    let levels: Vec<(usize, &[f64])> =
                        d.levels.iter().map(|l| (l.scale, &l.detail[..])).collect();
                    let smooth: Vec<(usize, &[f64])> =
                        d.levels.iter().map(|l| (l.scale, &l.smooth[..])).collect();
                    out.text(&decomposition_rows(&levels, &smooth))
                }
            }
        }
    }
}

fn read_columns(path: &Path) -> lrh::Result<(Vec<String>, Vec<Vec<f64>>)> {
    let reader: Box<dyn BufRead> = if path.as_os_str() == "-" {
        Box::new(BufReader::new(io::stdin()))
    } else {
        Box::new(BufReader::new(File::open(path)?))
    };
    let mut header = Vec::new();
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if i == 0 => header = fields.iter().map(|s| s.to_string()).collect(),
            Err(_) => {
                return Err(LrhError::Parse { row: i + 1, msg: format!("non-numeric field in {line:?}") });
            }
        }
    }
    if rows.is_empty() {
        return Err(LrhError::Domain("no numeric rows to plot".into()));
    }
    Ok((header, rows))
}

fn plot(input: &Path, kind: PlotKindArg, title: &str, index_x: bool, out: &Output) -> lrh::Result<()> {
    let (header, rows) = read_columns(input)?;
    let width = rows.iter().map(Vec::len).min().unwrap_or(0);
    let first_y = if index_x || width < 2 { 0 } else { 1 };
    let series = (first_y..width)
        .map(|c| Series {
            label: header.get(c).cloned().unwrap_or_else(|| format!("column {c}")),
            points: rows
                .iter()
                .enumerate()
                .map(|(i, r)| (if first_y == 0 { i as f64 } else { r[0] }, r[c]))
                .collect(),
        })
        .collect::<Vec<_>>();
    let kind = match kind {
        PlotKindArg::Line => PlotKind::Line,
        PlotKindArg::Scatter => PlotKind::Scatter,
    };
    out.text(&render_svg(&series, kind, title)?)
}

fn run(cli: Cli) -> lrh::Result<()> {
    let seed = RngSeed(cli.seed);
    let jobs = cli.jobs.max(1);
    let out = Output { out: cli.out, format: cli.format };
    match cli.command {
        Command::MakeSignal { shape, n, min, max } => {
            out.signal(&make_signal(&TestSignalSpec { shape, n, target_min: min, target_max: max })?)
        }
        Command::Sample { family, input } => out.signal(&sample_family(&read_signal(&input)?, family, seed)?),
        Command::Transform { kind, family, inverse, input } => transform(kind, family, inverse, &input, &out),
        Command::Stabilize { family, variant, input } => {
            let x = read_signal(&input)?;
            out.signal(&match variant {
                Variant::Decimated => stabilize(&x, family)?,
                Variant::TranslationInvariant => stabilize_ti(&x, family)?,
            })
        }
        Command::Unstabilize { family, input } => out.signal(&unstabilize(&read_signal(&input)?, family)?),
        Command::Denoise { family, smoothing, input } => {
            let x = read_signal(&input)?;
            out.signal(&denoise(&x, &smoothing.config(x.len(), family)?)?)
        }
        Command::CoeffStudy { family, j, left, right, reps } => {
            let spec = CoeffStudySpec { family, j, mean_left: left, mean_right: right, replications: reps };
            let report = coeff_study(&spec, seed, jobs)?;
            out.json(&report)?;
            if let Some(p) = &out.out {
                out.announce(&coeff_sidecars(&report, p)?);
            }
            Ok(())
        }
        Command::MseStudy { models, statistics, reps, n, j0, variant, threshold } => {
            let cfg = MseStudyConfig {
                models,
                statistics,
                replications: reps,
                n,
                j0,
                variant,
                threshold: match threshold {
                    ThresholdArg::Universal => None,
                    ThresholdArg::Fixed(t) => Some(t),
                },
            };
            let started = std::time::Instant::now();
            let report = mse_study(&cfg, seed, jobs)?;
            eprintln!("mse study finished in {:.1}s", started.elapsed().as_secs_f64());
            for c in &report.cells {
                eprintln!(
                    "{} {:4} mean {} se {}",
                    c.model,
                    c.statistic.to_string(),
                    format_g17(c.mean_mse),
                    format_g17(c.standard_error)
                );
            }
            out.json(&report)?;
            if let Some(p) = &out.out {
                out.announce(&mse_sidecars(&report, p)?);
            }
            Ok(())
        }
        Command::StabStudy { model, variant, n } => {
            if !matches!(model, SimModel::BlocksPoisson | SimModel::BlocksExponential) {
                return Err(LrhError::Domain("the stabilization study uses model 1a or 1b".into()));
            }
            let report = stabilization_study(model, Some(n), variant, seed)?;
            out.json(&report)?;
            if let Some(p) = &out.out {
                out.announce(&stab_sidecars(&report, p)?);
            }
            Ok(())
        }
        Command::DenoiseCounts { input, column, window, truncate, smoothing, report } => {
            let windowing = match (window, truncate) {
                (Some(w), _) => w,
                (None, true) => Windowing::Truncate,
                (None, false) => Windowing::Exact,
            };
            let cs = load_counts(&input, &column, windowing)?;
            let cfg = smoothing.config(cs.counts.len(), NoiseFamily::Poisson)?;
            let estimate = denoise_counts(&cs, &cfg)?;
            let mut w = out.writer()?;
            write_count_estimate(&cs, &estimate, &mut w)?;
            w.flush()?;
            if let Some(p) = report {
                let cfg = cfg.with_variant(Variant::TranslationInvariant);
                write_json(
                    &serde_json::json!({
                        "meta": lrh::harness::ReportMeta::new(seed.0),
                        "input": input.display().to_string(),
                        "column": cs.label,
                        "offset": cs.offset,
                        "n": cs.counts.len(),
                        "config": cfg,
                    }),
                    &p,
                )?;
            }
            Ok(())
        }
        Command::Plot { input, kind, title, index_x } => plot(&input, kind, &title, index_x, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
