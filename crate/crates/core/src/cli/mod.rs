//! Command-line front end: `compare`, `matrix`, `repeated` and `coverage`.
//!
//! Each command builds a [`Report`] and renders it in full before anything is
//! written, so output is emitted in one piece or not at all.

mod input;
mod report;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::compare::{
    compare_all, compare_pair, coverage_study, repeated_study, ComparisonConfig, IntervalSpec, SyntheticPopulationSpec,
};
use crate::dataset::PairedEvaluationSet;
use crate::error::{Error, Result};
use crate::interval::IntervalMethod;
use crate::metrics::{MetricRegistry, MetricSpec};
use crate::resampling::{ResamplingConfig, DEFAULT_CONFIDENCE_LEVEL, DEFAULT_REPLICATES};
use crate::sigtest::{Alternative, PermutationMode};

pub use input::{load_evaluation, FileFormat, PredictionFile};
pub use report::{
    repeated_table, round6, CompareView, ConfigView, CoverageRow, CoverageView, Header, MatrixView, PairRow,
    RepeatedRow, RepeatedView, Report, ReportBody, SystemRow, WarningView, SCHEMA_VERSION,
};
pub use svg::{render_forest_svg, Axis, AXIS_NS};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_GUARD: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "paircmp",
    version,
    about = "Confidence intervals and permutation tests for paired system comparisons"
)]
pub struct Cli {
    /// Worker threads for resampling (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interval and p-value for the difference between two systems.
    Compare(CompareArgs),
    /// Every system against each lower-ranked one, with letter groups.
    Matrix(MatrixArgs),
    /// Min/max summary over repeated cross-validation runs.
    Repeated(RepeatedArgs),
    /// Empirical interval coverage on a synthetic population.
    Coverage(CoverageArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Bca,
    Percentile,
}

impl From<MethodArg> for IntervalMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Bca => IntervalMethod::Bca,
            MethodArg::Percentile => IntervalMethod::Percentile,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlternativeArg {
    TwoSided,
    Greater,
    Less,
}

impl From<AlternativeArg> for Alternative {
    fn from(a: AlternativeArg) -> Self {
        match a {
            AlternativeArg::TwoSided => Alternative::TwoSided,
            AlternativeArg::Greater => Alternative::Greater,
            AlternativeArg::Less => Alternative::Less,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Tsv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Args)]
pub struct IntervalArgs {
    #[arg(long, value_enum, default_value = "bca")]
    pub method: MethodArg,
    /// Bootstrap replicates (also the number of random exchanges in the permutation test).
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub replicates: usize,
    #[arg(long, default_value_t = DEFAULT_CONFIDENCE_LEVEL)]
    pub level: f64,
    /// Master seed. Required for json and svg output; drawn at random otherwise.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
    /// Accept fewer than 100 replicates.
    #[arg(long)]
    pub allow_few_replicates: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    #[arg(long, default_value = "accuracy")]
    pub metric: String,
    /// Significance level of the permutation test.
    #[arg(long, default_value_t = crate::compare::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "two-sided")]
    pub alternative: AlternativeArg,
    /// Enumerate all 2^N exchanges (N <= 20).
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub gold: PathBuf,
    /// System predictions as NAME=PATH (give exactly two, or use --sys-a/--sys-b).
    #[arg(long = "sys", value_name = "NAME=PATH")]
    pub sys: Vec<String>,
    /// First system, as PATH or NAME=PATH.
    #[arg(long)]
    pub sys_a: Option<String>,
    /// Second system, as PATH or NAME=PATH.
    #[arg(long)]
    pub sys_b: Option<String>,
    #[command(flatten)]
    pub interval: IntervalArgs,
    #[command(flatten)]
    pub test: TestArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MatrixArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long = "sys", value_name = "NAME=PATH", required = true)]
    pub sys: Vec<String>,
    #[command(flatten)]
    pub interval: IntervalArgs,
    #[command(flatten)]
    pub test: TestArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RepeatedArgs {
    /// Directory with one subdirectory per run, each holding a `gold.*` file
    /// and one prediction file per system (named by file stem).
    #[arg(long)]
    pub runs: PathBuf,
    /// Systems to compare, in order (default: all, sorted by name).
    #[arg(long = "system", value_name = "NAME")]
    pub systems: Vec<String>,
    #[command(flatten)]
    pub interval: IntervalArgs,
    #[command(flatten)]
    pub test: TestArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CoverageArgs {
    /// `paired-bernoulli:pA,pB,agreement` or `paired-gaussian:rA,rB,coupling`.
    #[arg(long)]
    pub population: String,
    /// Instances per simulated evaluation set.
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[command(flatten)]
    pub interval: IntervalArgs,
}

/// Rendered output of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub report: Report,
    pub output: String,
}

pub fn exit_code(err: &Error) -> u8 {
    if err.is_guard() {
        EXIT_GUARD
    } else {
        EXIT_INPUT
    }
}

/// Runs a parsed command on a pool of `threads` workers (or the global pool).
pub fn run(cli: &Cli) -> Result<Rendered> {
    match cli.threads {
        Some(0) => Err(Error::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?
            .install(|| dispatch(&cli.command)),
        None => dispatch(&cli.command),
    }
}

fn dispatch(cmd: &Command) -> Result<Rendered> {
    match cmd {
        Command::Compare(a) => cmd_compare(a),
        Command::Matrix(a) => cmd_matrix(a),
        Command::Repeated(a) => cmd_repeated(a),
        Command::Coverage(a) => cmd_coverage(a),
    }
}

fn resolve_seed(args: &IntervalArgs) -> Result<(u64, bool)> {
    match (args.seed, args.format) {
        (Some(seed), _) => Ok((seed, false)),
        (None, ReportFormat::Json | ReportFormat::Svg) => {
            Err(Error::Config("--seed is required for json and svg output".into()))
        }
        (None, _) => Ok((rand::random(), true)),
    }
}

fn resampling_config(args: &IntervalArgs, seed: u64) -> ResamplingConfig {
    ResamplingConfig {
        replicates: args.replicates,
        confidence_level: args.level,
        method: args.method.into(),
        seed,
        allow_few_replicates: args.allow_few_replicates,
        ..Default::default()
    }
}

fn comparison_config(i: &IntervalArgs, t: &TestArgs, seed: u64) -> ComparisonConfig {
    ComparisonConfig {
        resampling: resampling_config(i, seed),
        alpha: t.alpha,
        alternative: t.alternative.into(),
        exact: t.exact,
    }
}

fn config_view(cfg: &ComparisonConfig, metric: &str) -> ConfigView {
    ConfigView {
        metric: Some(metric.to_owned()),
        method: cfg.resampling.method,
        replicates: cfg.resampling.replicates,
        level: cfg.resampling.confidence_level,
        alpha: Some(cfg.alpha),
        alternative: Some(cfg.alternative),
        permutation: Some(if cfg.exact {
            PermutationMode::Exact
        } else {
            PermutationMode::MonteCarlo
        }),
    }
}

fn metric(name: &str) -> Result<MetricSpec> {
    let registry = MetricRegistry::default();
    registry.get(name).cloned().ok_or_else(|| {
        let known: Vec<&str> = registry.names().collect();
        Error::Config(format!("unknown metric {name:?}; choose one of {}", known.join(", ")))
    })
}

fn parse_named(spec: &str) -> Result<(String, PathBuf)> {
    match spec.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => Ok((name.to_owned(), PathBuf::from(path))),
        _ => Err(Error::Config(format!("expected NAME=PATH, got {spec:?}"))),
    }
}

/// `NAME=PATH`, or a bare path named by its file stem.
fn parse_system_arg(spec: &str) -> Result<(String, PathBuf)> {
    if spec.contains('=') {
        return parse_named(spec);
    }
    let path = PathBuf::from(spec);
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::Config(format!("cannot derive a system name from {spec:?}")))?
        .to_owned();
    Ok((name, path))
}

fn render(report: Report, format: ReportFormat, seed_drawn: bool) -> Result<Rendered> {
    let output = match format {
        ReportFormat::Text => report.to_text(seed_drawn),
        ReportFormat::Tsv => report.to_tsv(seed_drawn),
        ReportFormat::Json => report.to_json(),
        ReportFormat::Svg => match &report.body {
            ReportBody::Matrix(v) => render_forest_svg(v),
            ReportBody::Compare(v) => render_forest_svg(&MatrixView::from(v)),
            _ => {
                return Err(Error::Config(format!(
                    "svg output is available for compare and matrix, not {}",
                    report.header.command
                )))
            }
        },
    };
    Ok(Rendered { report, output })
}

fn cmd_compare(args: &CompareArgs) -> Result<Rendered> {
    let (seed, drawn) = resolve_seed(&args.interval)?;
    let mut systems = args.sys.iter().map(|s| parse_named(s)).collect::<Result<Vec<_>>>()?;
    for s in [&args.sys_a, &args.sys_b].into_iter().flatten() {
        systems.push(parse_system_arg(s)?);
    }
    if systems.len() != 2 {
        return Err(Error::Arity(format!(
            "compare needs exactly two systems (--sys-a/--sys-b or two --sys), got {}",
            systems.len()
        )));
    }
    if systems[0].0 == systems[1].0 {
        systems[0].0.push_str("_a");
        systems[1].0.push_str("_b");
    }
    let metric = metric(&args.test.metric)?;
    let cfg = comparison_config(&args.interval, &args.test, seed);
    cfg.validate()?;
    let eval = load_evaluation(&args.gold, &systems, metric.kind().value_kind())?;
    let result = compare_pair(&eval, &systems[0].0, &systems[1].0, &metric, &cfg)?;
    let view = CompareView {
        metric: metric.name().to_owned(),
        n_instances: eval.n_instances(),
        comparison: PairRow::from(&result),
    };
    let header = Header::new("compare", seed, config_view(&cfg, metric.name()));
    render(
        Report::new(header, ReportBody::Compare(view), &result.warnings),
        args.interval.format,
        drawn,
    )
}

fn cmd_matrix(args: &MatrixArgs) -> Result<Rendered> {
    let (seed, drawn) = resolve_seed(&args.interval)?;
    let systems = args.sys.iter().map(|s| parse_named(s)).collect::<Result<Vec<_>>>()?;
    let metric = metric(&args.test.metric)?;
    let cfg = comparison_config(&args.interval, &args.test, seed);
    cfg.validate()?;
    let eval = load_evaluation(&args.gold, &systems, metric.kind().value_kind())?;
    let matrix = compare_all(&eval, &metric, &cfg)?;
    let header = Header::new("matrix", seed, config_view(&cfg, metric.name()));
    render(
        Report::new(header, ReportBody::Matrix(MatrixView::from(&matrix)), &matrix.warnings),
        args.interval.format,
        drawn,
    )
}

/// Loads every run subdirectory of `dir`, in name order.
pub fn load_runs(dir: &Path, metric: &MetricSpec) -> Result<(Vec<String>, Vec<PairedEvaluationSet>)> {
    let io = |e: std::io::Error| Error::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    };
    let mut run_dirs: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()).map_err(io))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| p.is_dir())
        .collect();
    run_dirs.sort();
    if run_dirs.is_empty() {
        return Err(Error::Arity(format!(
            "{} contains no run subdirectories",
            dir.display()
        )));
    }
    let mut names = Vec::new();
    let mut sets = Vec::new();
    for run in &run_dirs {
        let mut files: Vec<PathBuf> = fs::read_dir(run)
            .map_err(io)?
            .map(|e| e.map(|e| e.path()).map_err(io))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|p| p.is_file() && !p.file_name().is_some_and(|n| n.to_string_lossy().starts_with('.')))
            .collect();
        files.sort();
        let stem = |p: &Path| {
            p.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        };
        let gold = files
            .iter()
            .find(|p| stem(p) == "gold")
            .ok_or_else(|| Error::Alignment(format!("{} has no gold.* file", run.display())))?;
        let systems: Vec<(String, PathBuf)> = files
            .iter()
            .filter(|p| *p != gold)
            .map(|p| (stem(p), p.clone()))
            .collect();
        sets.push(load_evaluation(gold, &systems, metric.kind().value_kind())?);
        names.push(
            run.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
        );
    }
    let first: Vec<&str> = sets[0].system_names().collect();
    for (name, set) in names.iter().zip(&sets).skip(1) {
        let these: Vec<&str> = set.system_names().collect();
        if these != first {
            return Err(Error::Consistency(format!(
                "run {name} has systems [{}], run {} has [{}]",
                these.join(", "),
                names[0],
                first.join(", ")
            )));
        }
    }
    Ok((names, sets))
}

fn cmd_repeated(args: &RepeatedArgs) -> Result<Rendered> {
    let (seed, drawn) = resolve_seed(&args.interval)?;
    let metric = metric(&args.test.metric)?;
    let cfg = comparison_config(&args.interval, &args.test, seed);
    cfg.validate()?;
    let (run_names, runs) = load_runs(&args.runs, &metric)?;
    let systems: Vec<String> = if args.systems.is_empty() {
        runs[0].system_names().map(str::to_owned).collect()
    } else {
        args.systems.clone()
    };
    let summaries = repeated_study(&runs, &systems, &metric, &cfg)?;
    let view = RepeatedView {
        metric: metric.name().to_owned(),
        n_runs: runs.len(),
        runs: run_names,
        rows: summaries.iter().map(RepeatedRow::from).collect(),
    };
    let header = Header::new("repeated", seed, config_view(&cfg, metric.name()));
    render(
        Report::new(header, ReportBody::Repeated(view), []),
        args.interval.format,
        drawn,
    )
}

fn cmd_coverage(args: &CoverageArgs) -> Result<Rendered> {
    let (seed, drawn) = resolve_seed(&args.interval)?;
    let population: SyntheticPopulationSpec = args.population.parse()?;
    let cfg = resampling_config(&args.interval, seed);
    let spec = IntervalSpec {
        method: cfg.method,
        level: cfg.confidence_level,
    };
    let reports = coverage_study(&population, args.n, args.trials, &cfg, &[spec])?;
    let config = ConfigView {
        metric: Some(population.metric().name().to_owned()),
        method: cfg.method,
        replicates: cfg.replicates,
        level: cfg.confidence_level,
        alpha: None,
        alternative: None,
        permutation: None,
    };
    let header = Header::new("coverage", seed, config);
    let warnings = reports[0].warnings.clone();
    render(
        Report::new(header, ReportBody::Coverage(CoverageView::new(&reports)?), &warnings),
        args.interval.format,
        drawn,
    )
}
