//! `delta-ineq` command line: seeded suites, single evaluations and the
//! sharpness search, reported as JSON or versioned CSV.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use delta_ineq::harness::{self, FixedTrial, Outcome, Row, SharpnessConfig, SharpnessResult, SuiteReport, TrialConfig};
use delta_ineq::ostrowski::{self, KernelMoments, SpecSummary};
use delta_ineq::{BoundVariant, Func, KernelSpec, Theorem, TimeScale};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const CSV_VERSION_LINE: &str = "# delta-ineq v1";
pub const CSV_HEADER: [&str; 13] =
    ["trial_id", "theorem", "variant", "scale_kind", "a", "b", "x", "alpha", "beta", "lhs", "rhs", "slack", "pass"];

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] delta_ineq::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Parser)]
#[command(
    name = "delta-ineq",
    version,
    about = "Weighted Ostrowski bounds on time scales: identities, bounds, sharpness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Identity, calculus and proof-machinery checks over random trials.
    VerifyIdentity(SuiteArgs),
    /// Every bound over random trials, for the selected variants.
    VerifyBounds(SuiteArgs),
    /// Generic identity against the Z, qZ and R closed forms.
    Crosscheck(SuiteArgs),
    /// Coordinate ascent on lhs/rhs of one corrected bound.
    Sharpness(SharpnessArgs),
    /// Kernel moments, identity and all bounds for one fixed trial.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Residual and slack tolerance [default: 1e-10, or the config file's].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Inline JSON time scale, e.g. '{"kind":"integer","lo":0,"hi":8}'.
    #[arg(long)]
    pub scale: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// [default: both, or the config file's]
    #[arg(long, value_enum)]
    pub variant: Option<VariantChoice>,
}

#[derive(Debug, Args)]
pub struct SharpnessArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    /// T5, T6a, T6b, T7-L2, T7-Gruss or T8.
    #[arg(long, value_parser = parse_theorem)]
    pub theorem: Option<Theorem>,
    #[arg(long)]
    pub iterations: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// [default: both, or the config file's]
    #[arg(long, value_enum)]
    pub variant: Option<VariantChoice>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantChoice {
    Literal,
    Corrected,
    Both,
}

impl VariantChoice {
    pub fn variants(self) -> Vec<BoundVariant> {
        match self {
            VariantChoice::Literal => vec![BoundVariant::PaperLiteral],
            VariantChoice::Corrected => vec![BoundVariant::Corrected],
            VariantChoice::Both => vec![BoundVariant::PaperLiteral, BoundVariant::Corrected],
        }
    }
}

fn parse_theorem(s: &str) -> Result<Theorem, String> {
    Theorem::parse(s).ok_or_else(|| format!("unknown theorem '{s}'"))
}

/// Sharpness config file: every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharpnessFile {
    #[serde(default)]
    pub theorem: Option<Theorem>,
    #[serde(default)]
    pub spec: Option<KernelSpec>,
    #[serde(default)]
    pub search: Option<SharpnessConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentitySides {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Output of `eval`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub spec: SpecSummary,
    pub identity: IdentitySides,
    pub moments: KernelMoments,
    /// `sup |f^Delta|` over `(a, b)`.
    pub sup_abs_derivative: f64,
    pub range: (f64, f64),
    pub tolerance: f64,
    pub rows: Vec<Row>,
    pub outcome: Outcome,
}

/// Any report the CLI can emit.
#[derive(Debug)]
pub enum Report {
    Suite(SuiteReport),
    Eval(EvalReport),
    Sharpness { result: SharpnessResult, row: Row },
}

impl Report {
    pub fn outcome(&self) -> Outcome {
        match self {
            Report::Suite(r) => r.outcome,
            Report::Eval(r) => r.outcome,
            Report::Sharpness { result, .. } => {
                if result.violation {
                    Outcome::Failure
                } else {
                    Outcome::Pass
                }
            }
        }
    }

    pub fn rows(&self) -> &[Row] {
        match self {
            Report::Suite(r) => &r.rows,
            Report::Eval(r) => &r.rows,
            Report::Sharpness { row, .. } => std::slice::from_ref(row),
        }
    }

    fn to_json(&self) -> Result<String> {
        let text = match self {
            Report::Suite(r) => serde_json::to_string_pretty(r),
            Report::Eval(r) => serde_json::to_string_pretty(r),
            Report::Sharpness { result, .. } => serde_json::to_string_pretty(result),
        };
        text.map_err(|e| CliError::Config(e.to_string()))
    }
}

pub fn exit_code(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Pass | Outcome::Findings => 0,
        Outcome::Failure => 2,
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

fn checked_tol(common: &CommonArgs) -> Result<f64> {
    let tol = common.tol.unwrap_or(DEFAULT_TOL);
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(CliError::Config(format!("--tol must be positive, got {tol}")))
    }
}

fn inline_scale(common: &CommonArgs) -> Result<Option<TimeScale>> {
    common
        .scale
        .as_deref()
        .map(|s| TimeScale::from_json(s).map_err(|e| CliError::Config(format!("--scale: {e}"))))
        .transpose()
}

fn rebase(spec: &KernelSpec, ts: TimeScale) -> Result<KernelSpec> {
    Ok(KernelSpec::new(ts, spec.a(), spec.b(), spec.x(), spec.alpha(), spec.beta(), spec.h().clone())?)
}

pub fn suite_config(args: &SuiteArgs) -> Result<TrialConfig> {
    let mut cfg = match &args.common.config {
        Some(path) => TrialConfig::from_json(&read_file(path)?)?,
        None => TrialConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(n) = args.trials {
        cfg.n_trials = n;
    }
    if let Some(tol) = args.common.tol {
        cfg.tolerance = tol;
    }
    if let Some(v) = args.variant {
        cfg.variants = v.variants();
    }
    if let Some(ts) = inline_scale(&args.common)? {
        cfg.fixed_scale = Some(ts);
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Midpoint spec on `ts` with `h(t) = t` and unit weights.
fn default_spec(ts: TimeScale) -> Result<KernelSpec> {
    if !ts.is_discrete() || ts.len() < 3 {
        return Err(CliError::Config("sharpness needs a discrete scale with at least three points".into()));
    }
    let (a, b, x) = (ts.min(), ts.max(), ts.point(ts.len() / 2));
    Ok(KernelSpec::new(ts, a, b, x, 1.0, 1.0, Func::poly(vec![0.0, 1.0]))?)
}

pub fn run_sharpness(args: &SharpnessArgs) -> Result<Report> {
    let tol = checked_tol(&args.common)?;
    let file: SharpnessFile = match &args.common.config {
        Some(path) => parse_json(&read_file(path)?, "sharpness config")?,
        None => SharpnessFile::default(),
    };
    let scale = inline_scale(&args.common)?;
    let spec = match (file.spec, scale) {
        (Some(spec), Some(ts)) => rebase(&spec, ts)?,
        (Some(spec), None) => spec,
        (None, Some(ts)) => default_spec(ts)?,
        (None, None) => default_spec(TimeScale::integer(0, 8)?)?,
    };
    let theorem = args.theorem.or(file.theorem).unwrap_or(Theorem::T5);
    let mut search = file.search.unwrap_or_default();
    if let Some(seed) = args.seed {
        search.seed = seed;
    }
    if let Some(n) = args.iterations {
        search.max_iterations = n;
    }
    if args.common.tol.is_some() {
        search.tolerance = tol;
    }
    let result = harness::sharpness_search(theorem, &spec, &search)?;
    let range = match (theorem.needs_range(), search.range) {
        (true, Some(r)) => r,
        _ => ostrowski::delta_derivative_range(spec.scale(), &result.f, spec.a(), spec.b())?,
    };
    let r = ostrowski::evaluate(theorem, &spec, &result.f, result.g.as_ref(), Some(range), BoundVariant::Corrected)?;
    let row = bound_row(0, &r, search.tolerance);
    Ok(Report::Sharpness { result, row })
}

fn bound_row(trial_id: u64, r: &ostrowski::BoundReport, tol: f64) -> Row {
    Row {
        trial_id,
        theorem: r.theorem.label().to_string(),
        variant: Some(r.variant),
        spec: r.spec_summary.clone(),
        lhs: r.lhs,
        rhs: r.rhs,
        slack: r.slack,
        pass: r.holds(tol),
    }
}

pub fn run_eval(args: &EvalArgs) -> Result<Report> {
    let tol = checked_tol(&args.common)?;
    let path = args.common.config.as_ref().ok_or_else(|| CliError::Config("eval needs --config".into()))?;
    let mut trial: FixedTrial = parse_json(&read_file(path)?, "eval config")?;
    if let Some(ts) = inline_scale(&args.common)? {
        trial.spec = rebase(&trial.spec, ts)?;
    }
    let variants = args.variant.unwrap_or(VariantChoice::Both).variants();
    Ok(Report::Eval(evaluate_trial(&trial, &variants, tol)?))
}

/// Identity, moments and every bound for one trial. `g` defaults to `f`.
pub fn evaluate_trial(trial: &FixedTrial, variants: &[BoundVariant], tol: f64) -> Result<EvalReport> {
    let spec = &trial.spec;
    let ts = spec.scale();
    let lhs = ostrowski::montgomery_lhs(spec, &trial.f)?;
    let rhs = ostrowski::montgomery_rhs(spec, &trial.f)?;
    let range = match trial.range {
        Some(r) => r,
        None => ostrowski::delta_derivative_range(ts, &trial.f, spec.a(), spec.b())?,
    };
    let g = trial.g.as_ref().unwrap_or(&trial.f);
    let mut rows = Vec::new();
    for &variant in variants {
        for r in ostrowski::evaluate_all(spec, &trial.f, g, Some(range), variant)? {
            rows.push(bound_row(0, &r, tol));
        }
    }
    let outcome = if rows.iter().any(|r| !r.pass && r.variant == Some(BoundVariant::Corrected)) {
        Outcome::Failure
    } else if rows.iter().any(|r| !r.pass) {
        Outcome::Findings
    } else {
        Outcome::Pass
    };
    Ok(EvalReport {
        spec: SpecSummary::from(spec),
        identity: IdentitySides { lhs, rhs, residual: lhs - rhs },
        moments: ostrowski::kernel_moments(spec, tol)?,
        sup_abs_derivative: ostrowski::sup_abs_delta_derivative(ts, &trial.f, spec.a(), spec.b())?,
        range,
        tolerance: tol,
        rows,
        outcome,
    })
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Versioned CSV: the `# delta-ineq v1` line, the header, one line per row.
pub fn write_csv(rows: &[Row], out: impl Write) -> Result<()> {
    let mut out = out;
    writeln!(out, "{CSV_VERSION_LINE}").map_err(csv::Error::from)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.trial_id.to_string(),
            r.theorem.clone(),
            r.variant.map(|v| v.label().to_string()).unwrap_or_default(),
            r.spec.scale_kind.clone(),
            float(r.spec.a),
            float(r.spec.b),
            float(r.spec.x),
            float(r.spec.alpha),
            float(r.spec.beta),
            float(r.lhs),
            float(r.rhs),
            float(r.slack),
            r.pass.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes `report` to `out` (or `stdout` when `out` is `None`).
pub fn emit_report(report: &Report, format: Format, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let mut buf = Vec::new();
    match format {
        Format::Json => {
            buf.extend_from_slice(report.to_json()?.as_bytes());
            buf.push(b'\n');
        }
        Format::Csv => write_csv(report.rows(), &mut buf)?,
    }
    match out {
        Some(path) => fs::write(path, &buf).map_err(|source| CliError::Io { path: path.to_path_buf(), source }),
        None => stdout.write_all(&buf).map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

/// Parses `args`, runs the command and emits its report. Returns the
/// process exit code for a completed run.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<i32>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let (report, common) = match &cli.command {
        Command::VerifyIdentity(a) => (Report::Suite(harness::run_identity_suite(&suite_config(a)?)?), &a.common),
        Command::VerifyBounds(a) => (Report::Suite(harness::run_bound_suite(&suite_config(a)?)?), &a.common),
        Command::Crosscheck(a) => (Report::Suite(harness::run_crosscheck_suite(&suite_config(a)?)?), &a.common),
        Command::Sharpness(a) => (run_sharpness(a)?, &a.common),
        Command::Eval(a) => (run_eval(a)?, &a.common),
    };
    emit_report(&report, common.format, common.out.as_deref(), stdout)?;
    Ok(exit_code(report.outcome()))
}
