//! Command-line front end: argument types and the four subcommands.
//!
//! The `copeland` binary only parses arguments and maps errors to exit
//! codes; everything else lives here so it can be driven from tests.

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bandit::{AlgorithmConfig, Variant};
use crate::copeland::CopelandSummary;
use crate::datasets::{sample_submatrix, Dataset};
use crate::error::{Error, Result};
use crate::harness::{simulate_batch, write_trace, BatchSpec, TraceFormat};
use crate::matrix::{PreferenceMatrix, TieMode};
use crate::solvers::{
    ccb_bound, ecw_best, ecw_constant, ecw_explicit_bound, ecw_worstcase_bound, lower_bound,
    OptimalExploration, SolverConfig,
};

#[derive(Debug, Parser)]
#[command(name = "copeland", version, about = "Copeland dueling bandits: regret bounds and simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Copeland summary, lower bound, ECW constant and closed-form bounds.
    Bounds(BoundsArgs),
    /// Monte-Carlo regret simulation; writes a trace file.
    Run(RunArgs),
    /// List the built-in datasets.
    Datasets(DatasetsArgs),
    /// Sample a random submatrix with a minimum gap.
    Submatrix(SubmatrixArgs),
}

/// Where the preference matrix comes from.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Built-in dataset name (see `copeland datasets`).
    #[arg(long)]
    pub dataset: Option<String>,
    /// CSV file with a full K x K matrix.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

impl Source {
    fn label(&self) -> String {
        match (&self.dataset, &self.input) {
            (Some(name), _) => name.clone(),
            (None, Some(path)) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "input".into()),
            (None, None) => "input".into(),
        }
    }

    fn load(&self, ties: TieMode) -> Result<PreferenceMatrix> {
        match (&self.dataset, &self.input) {
            (Some(name), _) => Dataset::from_name(name)?.load(ties),
            (None, Some(path)) => {
                PreferenceMatrix::read_csv(BufReader::new(fs::File::open(path)?), ties)
            }
            (None, None) => Err(Error::InvalidConfig("need --dataset or --input".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub source: Source,
    /// Emit JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Largest K for the exact LP (default: $COPELAND_K_MAX or 8).
    #[arg(long)]
    pub k_max: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Ecw,
    Cw,
    Random,
}

impl From<Algo> for Variant {
    fn from(a: Algo) -> Variant {
        match a {
            Algo::Ecw => Variant::Ecw,
            Algo::Cw => Variant::Cw,
            Algo::Random => Variant::Random,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    /// CSV with one column per run.
    CsvRuns,
    Json,
}

impl From<Format> for TraceFormat {
    fn from(f: Format) -> TraceFormat {
        match f {
            Format::Csv => TraceFormat::Csv,
            Format::CsvRuns => TraceFormat::CsvWithRuns,
            Format::Json => TraceFormat::Json,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum, default_value_t = Algo::Ecw)]
    pub algo: Algo,
    #[arg(long, default_value_t = AlgorithmConfig::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = AlgorithmConfig::DEFAULT_BETA)]
    pub beta: f64,
    /// Horizon (number of rounds).
    #[arg(long = "T", visible_alias = "horizon", default_value_t = 10_000)]
    pub horizon: u64,
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (does not change the output).
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output file (default: <out-dir>/<dataset>_<algo>_T<T>_r<runs>_s<seed>.<ext>).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Largest K for the exact LP used by `--algo cw`.
    #[arg(long)]
    pub k_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DatasetsArgs {
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SubmatrixArgs {
    #[command(flatten)]
    pub source: Source,
    /// Number of arms to keep.
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0)]
    pub min_gap: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn solver_config(k_max: Option<usize>) -> Result<SolverConfig> {
    match k_max {
        Some(k) => SolverConfig::new(k),
        None => SolverConfig::from_env(),
    }
}

/// Rounds to three significant figures for display.
pub fn sig3(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = 2 - magnitude;
    if decimals > 0 {
        format!("{:.*}", decimals as usize, x)
    } else {
        let scale = 10f64.powi(-decimals);
        format!("{:.0}", (x / scale).round() * scale)
    }
}

fn one_based(arms: &[usize]) -> Vec<usize> {
    arms.iter().map(|a| a + 1).collect()
}

#[derive(Debug, Serialize)]
pub struct BoundsReport {
    pub dataset: String,
    pub k: usize,
    pub losses: Vec<usize>,
    /// 1-based.
    pub winners: Vec<usize>,
    pub condorcet: bool,
    pub min_gap: f64,
    /// Exact LP lower bound; absent when `K > K_max`.
    pub lower_bound: Option<OptimalExploration>,
    pub lower_bound_skipped: Option<String>,
    pub ecw: OptimalExploration,
    pub ecw_explicit_bound: f64,
    pub ecw_worstcase_bound: f64,
    pub ccb_bound: f64,
    /// `lambda~ / lambda` when the lower bound is available.
    pub relaxation_ratio: Option<f64>,
}

pub fn bounds_report(label: &str, matrix: &PreferenceMatrix, config: &SolverConfig) -> Result<BoundsReport> {
    let summary = CopelandSummary::new(matrix)?;
    let (lb, skipped) = match lower_bound(matrix, config) {
        Ok(lb) => (Some(lb), None),
        Err(Error::TooLarge { k, k_max }) => {
            (None, Some(format!("skipped (K = {k} > K_max = {k_max})")))
        }
        Err(e) => return Err(e),
    };
    let ecw = ecw_best(matrix)?;
    let relaxation_ratio = lb.as_ref().map(|lb| ecw.constant / lb.constant);
    Ok(BoundsReport {
        dataset: label.to_string(),
        k: matrix.k(),
        losses: summary.losses.clone(),
        winners: one_based(&summary.winners),
        condorcet: summary.is_condorcet(),
        min_gap: matrix.min_gap(),
        lower_bound: lb,
        lower_bound_skipped: skipped,
        ecw_explicit_bound: ecw_explicit_bound(matrix, ecw.winner)?,
        ecw_worstcase_bound: ecw_worstcase_bound(matrix)?,
        ccb_bound: ccb_bound(matrix)?,
        ecw,
        relaxation_ratio,
    })
}

fn write_bounds_text<W: Write>(r: &BoundsReport, out: &mut W) -> Result<()> {
    writeln!(out, "dataset: {} (K={})", r.dataset, r.k)?;
    writeln!(out, "Copeland losses: {:?}", r.losses)?;
    writeln!(
        out,
        "winners: {:?} (C={}, Condorcet={})",
        r.winners,
        r.winners.len(),
        if r.condorcet { "yes" } else { "no" }
    )?;
    match (&r.lower_bound, &r.lower_bound_skipped) {
        (Some(lb), _) => writeln!(
            out,
            "lambda (lower bound): {} [winner {}]",
            sig3(lb.constant),
            lb.winner + 1
        )?,
        (None, Some(reason)) => writeln!(out, "lambda (lower bound): {reason}")?,
        (None, None) => {}
    }
    writeln!(
        out,
        "lambda~ (ECW-RMED): {} [winner {}]",
        sig3(r.ecw.constant),
        r.ecw.winner + 1
    )?;
    if let Some(ratio) = r.relaxation_ratio {
        if r.winners.len() >= 2 {
            let flag = if (ratio - 1.0).abs() <= 1e-6 { "equal (C >= 2)" } else { "NOT equal (C >= 2)" };
            writeln!(out, "lambda vs lambda~: {flag}")?;
        } else {
            writeln!(out, "lambda vs lambda~: ratio {}", sig3(ratio))?;
        }
    }
    writeln!(out, "explicit ECW bound: {}", sig3(r.ecw_explicit_bound))?;
    writeln!(out, "worst-case ECW bound: {}", sig3(r.ecw_worstcase_bound))?;
    writeln!(out, "CCB bound: {}", sig3(r.ccb_bound))?;
    Ok(())
}

pub fn cmd_bounds<W: Write>(args: &BoundsArgs, out: &mut W) -> Result<()> {
    let config = solver_config(args.k_max)?;
    let matrix = args.source.load(TieMode::Strict)?;
    let report = bounds_report(&args.source.label(), &matrix, &config)?;
    if args.json {
        serde_json::to_writer_pretty(&mut *out, &report)?;
        writeln!(out)?;
    } else {
        write_bounds_text(&report, out)?;
    }
    Ok(())
}

/// Runs the batch, writes the trace and returns its path.
pub fn cmd_run<W: Write>(args: &RunArgs, out: &mut W) -> Result<PathBuf> {
    let matrix = args.source.load(TieMode::Strict)?;
    let config = AlgorithmConfig {
        alpha: args.alpha,
        beta: args.beta,
        variant: args.algo.into(),
        solver: solver_config(args.k_max)?,
    };
    let spec = BatchSpec {
        dataset: args.source.label(),
        matrix,
        config,
        horizon: args.horizon,
        runs: args.runs,
        master_seed: args.seed,
        parallelism: args.jobs,
    };
    let trace = simulate_batch(&spec)?;
    let format: TraceFormat = args.format.into();
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| args.out_dir.join(trace.meta.file_name(format.extension())));
    let mut buffer = Vec::new();
    write_trace(&trace, &mut buffer, format)?;
    write_atomically(&path, &buffer)?;

    let lambda = ecw_constant(&spec.matrix)?;
    let log_t = (spec.horizon as f64).ln();
    writeln!(out, "trace: {}", path.display())?;
    writeln!(
        out,
        "final mean regret: {:.2} (std {:.2}, {} runs, T = {})",
        trace.final_mean(),
        trace.final_std(),
        spec.runs,
        spec.horizon
    )?;
    if log_t > 0.0 {
        writeln!(
            out,
            "R(T) / (lambda~ ln T): {:.3} (lambda~ = {})",
            trace.final_mean() / (lambda * log_t),
            sig3(lambda)
        )?;
    }
    Ok(path)
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let result = fs::File::create(path).and_then(|mut f| {
        f.write_all(bytes)?;
        f.sync_all()
    });
    if let Err(e) = result {
        let _ = fs::remove_file(path);
        return Err(e.into());
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct DatasetInfo {
    pub name: &'static str,
    pub k: usize,
    pub winners: usize,
    pub condorcet: bool,
    pub min_loss: usize,
    pub ties: usize,
}

pub fn dataset_listing() -> Result<Vec<DatasetInfo>> {
    Dataset::ALL
        .iter()
        .map(|&d| {
            let m = d.load(TieMode::Tolerant)?;
            let s = CopelandSummary::tie_tolerant(&m);
            Ok(DatasetInfo {
                name: d.name(),
                k: m.k(),
                winners: s.winner_count(),
                condorcet: s.is_condorcet(),
                min_loss: s.min_loss(),
                ties: m.tied_pairs().count(),
            })
        })
        .collect()
}

pub fn cmd_datasets<W: Write>(args: &DatasetsArgs, out: &mut W) -> Result<()> {
    let listing = dataset_listing()?;
    if args.json {
        serde_json::to_writer_pretty(&mut *out, &listing)?;
        writeln!(out)?;
        return Ok(());
    }
    for d in listing {
        write!(
            out,
            "{} K={} C={} Condorcet={} L(1)={}",
            d.name,
            d.k,
            d.winners,
            if d.condorcet { "yes" } else { "no" },
            d.min_loss
        )?;
        if d.ties > 0 {
            write!(out, " ties={}", d.ties)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn cmd_submatrix<W: Write>(args: &SubmatrixArgs, out: &mut W) -> Result<()> {
    let matrix = args.source.load(TieMode::Tolerant)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let sub = sample_submatrix(&matrix, args.k, args.min_gap, &mut rng)?;
    let arms: Vec<String> = sub.arms.iter().map(|a| (a + 1).to_string()).collect();
    let text = format!("# arms: {}\n{}", arms.join(","), sub.matrix.to_csv_string());
    match &args.out {
        Some(path) => write_atomically(path, text.as_bytes()),
        None => {
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn execute<W: Write>(cli: &Cli, out: &mut W) -> Result<()> {
    match &cli.command {
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Run(a) => cmd_run(a, out).map(|_| ()),
        Command::Datasets(a) => cmd_datasets(a, out),
        Command::Submatrix(a) => cmd_submatrix(a, out),
    }
}
