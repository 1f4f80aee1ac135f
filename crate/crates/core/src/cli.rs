//! Command-line front end. Every subcommand is a thin adapter over the
//! library; the binary only parses arguments and maps errors to exit codes.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::engine::Time;
use crate::error::{ConfigError, IoError, ModelError, SweepError};
use crate::expio::{self, ResultRow};
use crate::harness;
use crate::model::{self, FitRow};
use crate::workstealing::{parse_victim_script, ResponsePolicy, SimConfig, Simulation};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Usage(String),
}

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io(IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Parser)]
#[command(
    name = "ws-latency",
    version,
    about = "Work stealing with latency: simulator and makespan model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one configuration and print each result as a JSON line
    Run(RunArgs),
    /// Execute a sweep document and write per-run and summary CSVs
    Sweep(SweepArgs),
    /// Fit c' from a results CSV
    Fit(FitArgs),
    /// Predict the makespan W/p + 2*lambda*c'*log2(W/(2*lambda))
    Predict(PredictArgs),
    /// Solve for the limit latency of acceptable makespans
    Limit(LimitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Swt,
    Mwt,
}

impl From<Policy> for ResponsePolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Swt => ResponsePolicy::Swt,
            Policy::Mwt => ResponsePolicy::Mwt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Total work, in time units
    #[arg(long = "W")]
    pub work: Time,
    /// Number of processors
    #[arg(long = "p")]
    pub procs: usize,
    /// One-way message latency, in time units
    #[arg(long = "lambda")]
    pub latency: Time,
    /// Response policy; multiple transfers (mwt) is the better performer
    #[arg(long, value_enum, default_value = "mwt")]
    pub policy: Policy,
    /// Refuse steals when the victim holds less than the threshold
    #[arg(long, value_enum, default_value = "on")]
    pub threshold: Switch,
    /// Steal threshold [default: 2*lambda, the break-even transfer size]
    #[arg(long)]
    pub threshold_value: Option<Time>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Runs with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    pub replications: u64,
    /// File of `thief -> victim` lines overriding random victim choice
    #[arg(long)]
    pub victim_script: Option<PathBuf>,
    /// Write a Paje trace of the first run
    #[arg(long)]
    pub trace_output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub sweep_file: PathBuf,
    /// Per-run CSV [default: the document's `output`]
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Summary CSV [default: the document's `aggregate_output`, else <output>.summary.csv]
    #[arg(long)]
    pub aggregate_output: Option<PathBuf>,
    /// Also write the per-run rows as JSON
    #[arg(long)]
    pub json_output: Option<PathBuf>,
    /// Constant used for the accuracy ratio in the summary
    #[arg(long, default_value_t = model::DEFAULT_C_PRIME)]
    pub c_prime: f64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub input_csv: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long = "W")]
    pub work: f64,
    #[arg(long = "p")]
    pub procs: f64,
    #[arg(long = "lambda")]
    pub latency: f64,
    /// Fitted constant of the latency term
    #[arg(long, default_value_t = model::DEFAULT_C_PRIME)]
    pub c_prime: f64,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long = "W")]
    pub work: f64,
    #[arg(long = "p")]
    pub procs: f64,
    /// Latency for which to report the processor limit
    #[arg(long = "lambda")]
    pub latency: Option<Time>,
    #[arg(long, default_value_t = model::DEFAULT_C_PRIME)]
    pub c_prime: f64,
    /// Acceptable makespan, as a multiple of W/p
    #[arg(long, default_value_t = model::DEFAULT_ACCEPT_FACTOR)]
    pub accept_factor: f64,
    /// Slope of the W/p = slope * lambda rule
    #[arg(long, default_value_t = model::DEFAULT_RULE_SLOPE)]
    pub rule_slope: f64,
}

impl RunArgs {
    pub fn config(&self) -> Result<SimConfig, CliError> {
        let mut cfg = SimConfig::new(self.work, self.procs, self.latency)
            .with_policy(self.policy.into())
            .with_threshold(self.threshold == Switch::On)
            .with_seed(self.seed);
        if let Some(v) = self.threshold_value {
            cfg = cfg.with_threshold_value(v);
        }
        if let Some(path) = &self.victim_script {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            cfg = cfg.with_victim_script(parse_victim_script(&text)?);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn execute<W: Write>(cli: Cli, out: &mut W) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => run(&args, out),
        Command::Sweep(args) => sweep(&args, out),
        Command::Fit(args) => fit(&args, out),
        Command::Predict(args) => {
            let v = model::predict_makespan(args.work, args.procs, args.latency, args.c_prime)?;
            writeln!(out, "{v:.3}").map_err(|e| io_error(Path::new("<stdout>"), e))
        }
        Command::Limit(args) => limit(&args, out),
    }
}

fn run<W: Write>(args: &RunArgs, out: &mut W) -> Result<(), CliError> {
    let base = args.config()?;
    if args.replications < 1 {
        return Err(CliError::Usage("--replications must be at least 1".into()));
    }
    for r in 0..args.replications {
        let cfg = base.clone().with_seed(base.seed + r);
        let (result, trace) = Simulation::new(cfg)?.run();
        if r == 0 {
            if let Some(path) = &args.trace_output {
                expio::export_paje(&trace, base.latency, path)?;
            }
        }
        let line = serde_json::to_string(&result).expect("results serialize");
        writeln!(out, "{line}").map_err(|e| io_error(Path::new("<stdout>"), e))?;
    }
    Ok(())
}

fn sweep<W: Write>(args: &SweepArgs, out: &mut W) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.sweep_file).map_err(|e| io_error(&args.sweep_file, e))?;
    let spec = expio::parse_sweep(&text)?;
    let output = args
        .output
        .clone()
        .or_else(|| spec.output.clone())
        .ok_or_else(|| CliError::Usage("no output path: pass --output or set `output` in the sweep".into()))?;
    let aggregate_path = args
        .aggregate_output
        .clone()
        .or_else(|| spec.aggregate_output.clone())
        .unwrap_or_else(|| output.with_extension("summary.csv"));

    let results = harness::run_sweep(&spec)?;
    expio::write_results(&results, &output)?;
    if let Some(path) = &args.json_output {
        expio::write_results_json(&results, path)?;
    }
    let summary = expio::aggregate(&expio::result_rows(&results), args.c_prime);
    expio::write_aggregate(&summary, &aggregate_path)?;
    writeln!(
        out,
        "{} runs -> {}\nsummary -> {}",
        results.len(),
        output.display(),
        aggregate_path.display()
    )
    .map_err(|e| io_error(Path::new("<stdout>"), e))
}

/// Mean makespan per (W, p, lambda) over every in-domain row.
pub fn fit_rows(rows: &[ResultRow]) -> Vec<FitRow> {
    let mut groups: BTreeMap<(Time, usize, Time), (f64, usize)> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.work > 2 * r.lambda) {
        let e = groups.entry((r.work, r.p, r.lambda)).or_default();
        e.0 += r.makespan as f64;
        e.1 += 1;
    }
    groups
        .into_iter()
        .map(|((w, p, l), (sum, n))| FitRow {
            work: w as f64,
            procs: p as f64,
            latency: l as f64,
            mean_makespan: sum / n as f64,
        })
        .collect()
}

fn fit<W: Write>(args: &FitArgs, out: &mut W) -> Result<(), CliError> {
    let rows = expio::read_results(&args.input_csv)?;
    let c = model::fit_cprime(&fit_rows(&rows))?;
    writeln!(out, "{c:.6}").map_err(|e| io_error(Path::new("<stdout>"), e))
}

fn limit<W: Write>(args: &LimitArgs, out: &mut W) -> Result<(), CliError> {
    if !(args.rule_slope > 0.0) {
        return Err(ModelError::NonPositive {
            name: "rule_slope",
            value: args.rule_slope,
        }
        .into());
    }
    let lambda = model::limit_latency(args.work, args.procs, args.c_prime, args.accept_factor)?;
    let mut report = serde_json::json!({ "limit_latency": lambda });
    if let Some(l) = args.latency {
        if l < 1 {
            return Err(ConfigError::NonPositive("lambda").into());
        }
        report["max_processors"] = model::max_processors(args.work as u64, l, args.rule_slope).into();
    }
    writeln!(out, "{report}").map_err(|e| io_error(Path::new("<stdout>"), e))
}
