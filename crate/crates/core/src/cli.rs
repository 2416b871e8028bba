//! Command-line front end.
//!
//! Exit codes: 0 success, 2 parse, 3 data, 4 convergence, 5 config,
//! 64 usage, 74 I/O. When `-o` is omitted, outputs are written to
//! `$SRA_DIAG_OUT_DIR` (or the working directory) under a default name.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::diagnostics::{
    calibrate_threshold, compare_windows, rolling_diagnose, write_reports_jsonl, MonitorConfig,
    DEFAULT_CALIBRATION_RUNS, DEFAULT_EPSILON_NS,
};
use crate::error::{Error, ErrorClass, Result};
use crate::fit::{
    applicability_range, estimate_lambda, fit_density, fit_powerlaw_sra, histogram_density,
    Binning, FitResult, DEFAULT_REL_TOL, DEFAULT_RUN_LEN,
};
use crate::models::{ModelKind, NoiseModel, ScaledModel};
use crate::sim::{simulate, write_simulation, SimConfig, TailCut};
use crate::sra::{build_sra, write_relative_csv, write_sra_csv, SraCurve, DEFAULT_COMPARISON_LEN};
use crate::timestamps::{inter_arrivals, read_series, AcquisitionMode, InterArrivalSeries, TickFormat};

pub const OUT_DIR_ENV: &str = "SRA_DIAG_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 64;

pub fn exit_code(class: ErrorClass) -> i32 {
    match class {
        ErrorClass::Parse => 2,
        ErrorClass::Data => 3,
        ErrorClass::Convergence => 4,
        ErrorClass::Config => 5,
        ErrorClass::Io => 74,
    }
}

#[derive(Debug, Parser)]
#[command(name = "sra-diag", version, about = "Ranked-amplitude diagnostics for single-photon detector timestamps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic detector stream plus a ground-truth sidecar.
    Simulate(SimulateArgs),
    /// Write the SRA curve of a stream's inter-arrival times as CSV.
    Sra(SraArgs),
    /// Fit a noise model; writes FitResult JSON and a model-curve CSV.
    Fit(FitArgs),
    /// Relative SRA of a probe stream against a baseline stream.
    Compare(CompareArgs),
    /// Rolling drift diagnosis of a stream against a baseline.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Text,
    Binary,
}

#[derive(Debug, Args)]
pub struct InputFormat {
    /// Tick file layout; defaults to binary for `.bin`, text otherwise.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Drop zero-length gaps instead of failing on duplicate ticks.
    #[arg(long)]
    pub dedup: bool,
}

impl InputFormat {
    fn resolve(&self, path: &Path) -> TickFormat {
        resolve_format(self.format, path)
    }
}

fn resolve_format(f: Option<FormatArg>, path: &Path) -> TickFormat {
    match f {
        Some(FormatArg::Text) => TickFormat::TextLines,
        Some(FormatArg::Binary) => TickFormat::BinaryLe64,
        None => TickFormat::from_path(path),
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Primary dark-count rate in events per ns.
    #[arg(long, default_value_t = 1e-3)]
    pub dark_rate: f64,
    #[arg(long, default_value_t = 0.0)]
    pub afterpulse_prob: f64,
    #[arg(long, default_value_t = 1.2)]
    pub ap_alpha: f64,
    /// Minimum afterpulse delay (unit suffix ns/us/ms/s, default ns).
    #[arg(long, value_parser = parse_duration, default_value = "1us")]
    pub ap_xmin: f64,
    #[arg(long, value_parser = parse_duration, default_value = "0")]
    pub dead_time: f64,
    /// Gate period; enables gated mode.
    #[arg(long, value_parser = parse_duration)]
    pub gate_period: Option<f64>,
    #[arg(long, value_parser = parse_duration, default_value = "1e8")]
    pub duration: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cut the afterpulse delay law at this time.
    #[arg(long, value_parser = parse_duration)]
    pub tail_cut: Option<f64>,
    #[arg(long, value_enum, default_value = "clamp")]
    pub tail_mode: TailModeArg,
    /// Only primary events spawn afterpulses.
    #[arg(long)]
    pub single_generation: bool,
    #[arg(long, default_value = "sim")]
    pub label: String,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TailModeArg {
    Clamp,
    Conditional,
}

#[derive(Debug, Args)]
pub struct SraArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub input_format: InputFormat,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RouteArg {
    Sra,
    Histogram,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Poisson,
    Powerlaw,
    Saturating,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Poisson => ModelKind::Poisson,
            ModelArg::Powerlaw => ModelKind::PowerLaw,
            ModelArg::Saturating => ModelKind::Saturating,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long, value_enum, default_value = "sra")]
    pub route: RouteArg,
    #[arg(long, default_value_t = 100)]
    pub bins: usize,
    #[arg(long, value_enum, default_value = "log")]
    pub binning: BinningArg,
    /// Power-law lower bound; defaults to the dead time, else the smallest interval.
    #[arg(long, value_parser = parse_duration)]
    pub x_min: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_REL_TOL)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = DEFAULT_RUN_LEN)]
    pub run_len: usize,
    #[command(flatten)]
    pub input_format: InputFormat,
    /// FitResult JSON path; the model curve goes next to it as `.csv`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BinningArg {
    Linear,
    Log,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub probe: PathBuf,
    pub baseline: PathBuf,
    #[arg(short = 'm', long = "resample-len", default_value_t = DEFAULT_COMPARISON_LEN)]
    pub m: usize,
    #[command(flatten)]
    pub input_format: InputFormat,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    pub stream: PathBuf,
    #[arg(long)]
    pub baseline: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub window: usize,
    /// Defaults to the window size.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Fixed drift threshold; calibrated from the baseline when omitted.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_CALIBRATION_RUNS)]
    pub calibration_runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short = 'm', long = "resample-len", default_value_t = DEFAULT_COMPARISON_LEN)]
    pub m: usize,
    #[arg(long, value_parser = parse_duration, default_value_t = DEFAULT_EPSILON_NS)]
    pub epsilon: f64,
    #[command(flatten)]
    pub input_format: InputFormat,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Parses a duration with optional `ns`, `us`/`µs`, `ms` or `s` suffix into
/// nanoseconds. Bare numbers are nanoseconds.
pub fn parse_duration(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let (num, factor) = [("ns", 1.0), ("us", 1e3), ("µs", 1e3), ("ms", 1e6), ("s", 1e9)]
        .iter()
        .find_map(|(suf, f)| s.strip_suffix(suf).map(|n| (n, *f)))
        .unwrap_or((s, 1.0));
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|e| format!("invalid duration {s:?}: {e}"))?;
    if !(v >= 0.0 && v.is_finite()) {
        return Err(format!("duration must be non-negative, got {s:?}"));
    }
    Ok(v * factor)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(e.class())
        }
    }
}

pub fn execute(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sra(a) => cmd_sra(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Diagnose(a) => cmd_diagnose(a),
    }
}

fn output_path(explicit: &Option<PathBuf>, default_name: String) -> PathBuf {
    match explicit {
        Some(p) => p.clone(),
        None => std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_default()
            .join(default_name),
    }
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into())
}

fn load_intervals(path: &Path, fmt: &InputFormat) -> Result<InterArrivalSeries> {
    let series = read_series(path, fmt.resolve(path))?;
    inter_arrivals(&series, fmt.dedup)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let config = SimConfig {
        dark_rate: a.dark_rate,
        afterpulse_prob: a.afterpulse_prob,
        ap_alpha: a.ap_alpha,
        ap_xmin_ns: a.ap_xmin,
        dead_time_ns: a.dead_time.round() as u64,
        mode: if a.gate_period.is_some() {
            AcquisitionMode::Gated
        } else {
            AcquisitionMode::FreeRun
        },
        gate_period_ns: a.gate_period.map(|g| g.round() as u64),
        duration_ns: a.duration,
        seed: a.seed,
        tail_truncation_ns: a.tail_cut,
        tail_cut: match a.tail_mode {
            TailModeArg::Clamp => TailCut::Clamp,
            TailModeArg::Conditional => TailCut::Conditional,
        },
        branching: !a.single_generation,
        source_label: a.label.clone(),
    };
    let path = output_path(&a.output, format!("{}.bin", a.label));
    let series = simulate(&config)?;
    write_simulation(&path, &series, &config, resolve_format(a.format, &path))
}

fn cmd_sra(a: &SraArgs) -> Result<()> {
    let ia = load_intervals(&a.input, &a.input_format)?;
    let curve = build_sra(ia.intervals())?;
    let path = output_path(&a.output, format!("{}.sra.csv", stem(&a.input)));
    write_sra_csv(&curve, BufWriter::new(File::create(path)?))
}

fn cmd_fit(a: &FitArgs) -> Result<()> {
    let ia = load_intervals(&a.input, &a.input_format)?;
    let json_path = output_path(&a.output, format!("{}.fit.json", stem(&a.input)));
    let csv_path = json_path.with_extension("csv");
    let kind = ModelKind::from(a.model);

    let fit = match a.route {
        RouteArg::Sra => {
            let curve = build_sra(ia.intervals())?;
            let fit = fit_sra_route(&ia, &curve, kind, a)?;
            write_sra_model_csv(&curve, &fit.model, File::create(&csv_path)?)?;
            fit
        }
        RouteArg::Histogram => {
            let binning = match a.binning {
                BinningArg::Linear => Binning::Linear,
                BinningArg::Log => Binning::Log,
            };
            let hist = histogram_density(&ia, a.bins, binning)?;
            let mut fit = fit_density(&hist, kind, None)?;
            fit.applicability =
                crate::fit::density_applicability(&hist, &fit.model, a.rel_tol, a.run_len)?;
            let mut w = csv::Writer::from_writer(File::create(&csv_path)?);
            w.write_record(["t", "density", "model"])?;
            for (t, d) in hist.occupied() {
                let m = fit.model.density(t)?;
                w.write_record([t.to_string(), d.to_string(), m.to_string()])?;
            }
            w.flush()?;
            fit
        }
    };
    fs::write(json_path, serde_json::to_vec_pretty(&fit)?)?;
    Ok(())
}

fn fit_sra_route(ia: &InterArrivalSeries, curve: &SraCurve, kind: ModelKind, a: &FitArgs) -> Result<FitResult> {
    let mut fit = match kind {
        ModelKind::PowerLaw => {
            let dead = ia.meta().dead_time_ns as f64;
            let x_min = a
                .x_min
                .unwrap_or(if dead > 0.0 { dead } else { curve.min() });
            fit_powerlaw_sra(curve, x_min)?
        }
        ModelKind::Poisson => poisson_sra_fit(ia, curve)?,
        ModelKind::Saturating => {
            return Err(Error::Config(
                "the saturating model has no closed-form SRA; use --route histogram".into(),
            ))
        }
    };
    let model_curve = fit.model.sra_curve(curve.len())?;
    fit.applicability = applicability_range(curve, &model_curve, a.rel_tol, a.run_len)?;
    Ok(fit)
}

fn poisson_sra_fit(ia: &InterArrivalSeries, curve: &SraCurve) -> Result<FitResult> {
    let p = estimate_lambda(ia)?;
    let model = ScaledModel::unscaled(NoiseModel::Poisson(p));
    let n = curve.len();
    let mut ss = 0.0;
    let mut max_rel: f64 = 0.0;
    for k in 2..=n {
        let m = model.sra(n, k)?;
        let x = curve.values()[k - 1];
        ss += (x.ln() - m.ln()).powi(2);
        max_rel = max_rel.max(((x - m) / m).abs());
    }
    let model_curve = model.sra_curve(n)?;
    Ok(FitResult {
        model,
        residual_rms_log: (ss / (n - 1) as f64).sqrt(),
        max_rel_dev: max_rel,
        applicability: applicability_range(curve, &model_curve, DEFAULT_REL_TOL, DEFAULT_RUN_LEN)?,
        n_points_used: n - 1,
    })
}

fn write_sra_model_csv<W: Write>(curve: &SraCurve, model: &ScaledModel, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "x", "model"])?;
    let n = curve.len();
    for (k, x) in curve.ranked() {
        let m = if k == 1 { String::new() } else { model.sra(n, k)?.to_string() };
        w.write_record([k.to_string(), x.to_string(), m])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_compare(a: &CompareArgs) -> Result<()> {
    let probe = load_intervals(&a.probe, &a.input_format)?;
    let baseline = load_intervals(&a.baseline, &a.input_format)?;
    let config = MonitorConfig {
        window_size: probe.len().max(2),
        stride: 1,
        resample_len: a.m,
        threshold: f64::INFINITY,
        epsilon: DEFAULT_EPSILON_NS,
    };
    let report = compare_windows(&probe, &baseline, &config)?;
    let path = output_path(
        &a.output,
        format!("{}_vs_{}.rel.csv", stem(&a.probe), stem(&a.baseline)),
    );
    write_relative_csv(&report.relative, BufWriter::new(File::create(path)?))
}

fn cmd_diagnose(a: &DiagnoseArgs) -> Result<()> {
    let fmt = a.input_format.resolve(&a.stream);
    let stream = read_series(&a.stream, fmt)?;
    let baseline = load_intervals(&a.baseline, &a.input_format)?;
    let mut config = MonitorConfig {
        window_size: a.window,
        stride: a.stride.unwrap_or(a.window),
        resample_len: a.m,
        threshold: a.threshold.unwrap_or(1.0),
        epsilon: a.epsilon,
    };
    config.validate()?;
    if a.threshold.is_none() {
        config.threshold =
            calibrate_threshold(&baseline, config.window_size, a.calibration_runs, a.seed, &config)?;
    }
    let out = rolling_diagnose(&stream, &baseline, &config)?;
    if let Some(note) = &out.note {
        eprintln!("note: {note}");
    }
    let path = output_path(&a.output, format!("{}.diag.jsonl", stem(&a.stream)));
    let mut w = BufWriter::new(File::create(path)?);
    write_reports_jsonl(&out.reports, &mut w)?;
    w.flush()?;
    Ok(())
}
