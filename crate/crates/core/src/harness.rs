//! Monte-Carlo regret simulation, aggregation and trace I/O.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandit::{random_baseline_select, AlgorithmConfig, DuelCounts, RmedState, Variant};
use crate::copeland::{CopelandSummary, RegretLedger};
use crate::error::{Error, Result};
use crate::matrix::PreferenceMatrix;

/// Log-spaced evaluation rounds `ceil(10^(k/10))` up to `horizon`, plus `horizon`.
pub fn checkpoints(horizon: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if horizon == 0 {
        return out;
    }
    for k in 0.. {
        let x = 10f64.powf(k as f64 / 10.0);
        let nearest = x.round();
        let t = if (x - nearest).abs() <= 1e-9 * nearest {
            nearest as u64
        } else {
            x.ceil() as u64
        };
        if t >= horizon {
            break;
        }
        if out.last() != Some(&t) {
            out.push(t);
        }
    }
    out.push(horizon);
    out
}

/// Seed of run `index` derived from a master seed (SplitMix64 finalizer).
pub fn split_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Result of a single simulated run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub checkpoints: Vec<u64>,
    /// Cumulative regret after each checkpoint round.
    pub regret: Vec<f64>,
    pub ledger: RegretLedger,
    pub counts: DuelCounts,
}

/// Plays `horizon` rounds on `matrix` with Bernoulli feedback drawn from a
/// ChaCha8 stream seeded by `seed`.
pub fn simulate(
    matrix: &PreferenceMatrix,
    config: &AlgorithmConfig,
    horizon: u64,
    seed: u64,
) -> Result<RunOutcome> {
    if horizon == 0 {
        return Err(Error::InvalidConfig("horizon must be >= 1".into()));
    }
    let summary = CopelandSummary::new(matrix)?;
    let mut state = RmedState::new(matrix.k(), config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ledger = RegretLedger::new(&summary);
    let grid = checkpoints(horizon);
    let mut regret = Vec::with_capacity(grid.len());
    let mut next = 0;
    for round in 1..=horizon {
        let pair = match config.variant {
            Variant::Random => random_baseline_select(&mut rng, matrix.k()),
            Variant::Cw | Variant::Ecw => state.select_pair(),
        };
        let first_wins = !pair.is_self() && rng.gen_bool(matrix.get(pair.hi, pair.lo));
        ledger.record(&summary, pair);
        state.update_and_plan(config, pair, first_wins)?;
        if grid[next] == round {
            regret.push(ledger.cumulative());
            next += 1;
        }
    }
    if state.counts().total() != horizon || ledger.rounds() != horizon {
        return Err(Error::InternalInconsistency(
            "draw counts do not add up to the horizon".into(),
        ));
    }
    Ok(RunOutcome {
        checkpoints: grid,
        regret,
        ledger,
        counts: state.counts().clone(),
    })
}

/// A batch of independent runs.
#[derive(Clone, Debug)]
pub struct BatchSpec {
    pub dataset: String,
    pub matrix: PreferenceMatrix,
    pub config: AlgorithmConfig,
    pub horizon: u64,
    pub runs: usize,
    pub master_seed: u64,
    /// Worker threads; results do not depend on it.
    pub parallelism: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub dataset: String,
    pub variant: Variant,
    pub alpha: f64,
    pub beta: f64,
    pub horizon: u64,
    pub runs: usize,
    pub master_seed: u64,
}

impl TraceMeta {
    /// `{dataset}_{variant}_T{horizon}_r{runs}_s{seed}.{ext}`
    pub fn file_name(&self, ext: &str) -> String {
        format!(
            "{}_{}_T{}_r{}_s{}.{}",
            self.dataset,
            self.variant.name(),
            self.horizon,
            self.runs,
            self.master_seed,
            ext
        )
    }
}

/// Per-run regret at each checkpoint with mean and sample standard deviation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegretTrace {
    pub meta: TraceMeta,
    pub checkpoints: Vec<u64>,
    pub runs: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl RegretTrace {
    pub fn from_runs(meta: TraceMeta, checkpoints: Vec<u64>, runs: Vec<Vec<f64>>) -> Result<Self> {
        if runs.is_empty() || checkpoints.is_empty() {
            return Err(Error::EmptyTrace);
        }
        let n = runs.len() as f64;
        let width = checkpoints.len();
        if runs.iter().any(|r| r.len() != width) {
            return Err(Error::InternalInconsistency("ragged regret trace".into()));
        }
        let mean: Vec<f64> = (0..width)
            .map(|c| runs.iter().map(|r| r[c]).sum::<f64>() / n)
            .collect();
        let std = (0..width)
            .map(|c| {
                if runs.len() < 2 {
                    return 0.0;
                }
                let ss: f64 = runs.iter().map(|r| (r[c] - mean[c]).powi(2)).sum();
                (ss / (n - 1.0)).sqrt()
            })
            .collect();
        Ok(RegretTrace {
            meta,
            checkpoints,
            runs,
            mean,
            std,
        })
    }

    pub fn final_mean(&self) -> f64 {
        *self.mean.last().expect("trace is non-empty")
    }

    pub fn final_std(&self) -> f64 {
        *self.std.last().expect("trace is non-empty")
    }

    /// Standard error of the mean at checkpoint `c`.
    pub fn standard_error(&self, c: usize) -> f64 {
        self.std[c] / (self.runs.len() as f64).sqrt()
    }
}

/// Runs `spec.runs` independent simulations; run `r` uses
/// `split_seed(master_seed, r)`. Output is independent of `parallelism`.
pub fn simulate_batch(spec: &BatchSpec) -> Result<RegretTrace> {
    if spec.runs == 0 {
        return Err(Error::InvalidConfig("runs must be >= 1".into()));
    }
    if spec.parallelism == 0 {
        return Err(Error::InvalidConfig("parallelism must be >= 1".into()));
    }
    spec.config.check_arms(spec.matrix.k())?;
    CopelandSummary::new(&spec.matrix)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.parallelism)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let outcomes: Vec<RunOutcome> = pool.install(|| {
        (0..spec.runs)
            .into_par_iter()
            .map(|r| {
                simulate(
                    &spec.matrix,
                    &spec.config,
                    spec.horizon,
                    split_seed(spec.master_seed, r as u64),
                )
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let meta = TraceMeta {
        dataset: spec.dataset.clone(),
        variant: spec.config.variant,
        alpha: spec.config.alpha,
        beta: spec.config.beta,
        horizon: spec.horizon,
        runs: spec.runs,
        master_seed: spec.master_seed,
    };
    let grid = checkpoints(spec.horizon);
    RegretTrace::from_runs(meta, grid, outcomes.into_iter().map(|o| o.regret).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceFormat {
    /// `checkpoint,mean_regret,std_regret`
    Csv,
    /// CSV with one extra `run_k` column per run.
    CsvWithRuns,
    Json,
}

impl TraceFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TraceFormat::Csv | TraceFormat::CsvWithRuns => "csv",
            TraceFormat::Json => "json",
        }
    }
}

pub fn write_trace<W: Write>(trace: &RegretTrace, mut sink: W, format: TraceFormat) -> Result<()> {
    if trace.checkpoints.is_empty() || trace.runs.is_empty() {
        return Err(Error::EmptyTrace);
    }
    match format {
        TraceFormat::Json => {
            serde_json::to_writer_pretty(&mut sink, trace)?;
            writeln!(sink)?;
        }
        TraceFormat::Csv | TraceFormat::CsvWithRuns => {
            let with_runs = format == TraceFormat::CsvWithRuns;
            write!(sink, "checkpoint,mean_regret,std_regret")?;
            if with_runs {
                for r in 0..trace.runs.len() {
                    write!(sink, ",run_{r}")?;
                }
            }
            writeln!(sink)?;
            for (c, t) in trace.checkpoints.iter().enumerate() {
                write!(sink, "{t},{},{}", trace.mean[c], trace.std[c])?;
                if with_runs {
                    for run in &trace.runs {
                        write!(sink, ",{}", run[c])?;
                    }
                }
                writeln!(sink)?;
            }
        }
    }
    sink.flush()?;
    Ok(())
}

pub fn read_trace_json<R: Read>(source: R) -> Result<RegretTrace> {
    let trace: RegretTrace = serde_json::from_reader(source)?;
    if trace.checkpoints.is_empty() || trace.runs.is_empty() {
        return Err(Error::EmptyTrace);
    }
    Ok(trace)
}
