//! CW-RMED, ECW-RMED and a uniform baseline as deterministic state machines.
//!
//! An RMED run alternates two stages:
//!
//! 1. **Guard batch.** At the start of every outer iteration each distinct
//!    pair with `N_ij < alpha sqrt(ln t)` or `|mu^_ij - 1/2| < beta / ln ln t`
//!    is queued (lexicographic order) and drawn once.
//! 2. **Loop pass.** The pairs of the current loop list `L_C` are drawn in
//!    lexicographic order. After every draw the planner checks whether the
//!    normalized counts `N_ij / ln t` already certify some empirical Copeland
//!    winner `i*`. If so only the self-pair `(i*, i*)` is proposed;
//!    otherwise the optimal rates `q°` of the best empirical winner are
//!    computed and every pair with `q°_ij > N_ij / ln t` is proposed together
//!    with `(i*, i*)`. Proposals not still pending in the current pass form
//!    the next loop list.
//!
//! `ln t` is evaluated as `ln max(t, 2)` in the planner and
//! `ln max(t, 1)` in the count guard; the near-tie guard is always active
//! while `t <= 16` (where `ln ln t` is undefined or tiny).

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constraints::{check_feasible, ConstraintFamily, FamilyKind, RateVector};
use crate::copeland::CopelandSummary;
use crate::error::{Error, Result};
use crate::matrix::{distinct_pairs, pair_count, Pair, PreferenceMatrix, TieMode};
use crate::solvers::exploration::{
    best_over_winners, ecw_optimal_with, lp_cw_optimal_with, SolverConfig,
};

/// Rounds during which the near-tie guard covers every pair (`ceil(e^e)`).
pub const NEAR_TIE_WARMUP: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Cw,
    Ecw,
    Random,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Cw => "cw",
            Variant::Ecw => "ecw",
            Variant::Random => "random",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cw" => Ok(Variant::Cw),
            "ecw" => Ok(Variant::Ecw),
            "random" => Ok(Variant::Random),
            other => Err(Error::InvalidConfig(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgorithmConfig {
    /// Scale of the forced `sqrt(ln t)` exploration; must be positive.
    pub alpha: f64,
    /// Scale of the near-tie guard; zero disables it.
    pub beta: f64,
    pub variant: Variant,
    /// Size limit for the exact LP used by the CW variant.
    pub solver: SolverConfig,
}

impl AlgorithmConfig {
    pub const DEFAULT_ALPHA: f64 = 3.0;
    pub const DEFAULT_BETA: f64 = 0.01;

    pub fn new(variant: Variant) -> Self {
        AlgorithmConfig {
            alpha: Self::DEFAULT_ALPHA,
            beta: Self::DEFAULT_BETA,
            variant,
            solver: SolverConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!("alpha = {} must be > 0", self.alpha)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidConfig(format!("beta = {} must be >= 0", self.beta)));
        }
        Ok(())
    }

    /// Validates the config and checks that the variant can run on `k` arms.
    pub fn check_arms(&self, k: usize) -> Result<()> {
        self.validate()?;
        if k < 2 {
            return Err(Error::InvalidConfig("need at least two arms".into()));
        }
        if self.variant == Variant::Cw {
            self.solver.check(k)?;
        }
        Ok(())
    }

    fn near_tie_threshold(&self, t: u64) -> f64 {
        if self.beta == 0.0 {
            0.0
        } else if t <= NEAR_TIE_WARMUP {
            f64::INFINITY
        } else {
            self.beta / (t as f64).ln().ln()
        }
    }
}

/// Draw and win counters. `wins[i][j]` counts duels of `(i, j)` won by `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuelCounts {
    k: usize,
    draws: Vec<u64>,
    self_draws: Vec<u64>,
    wins: Vec<u64>,
}

impl DuelCounts {
    pub fn new(k: usize) -> Self {
        DuelCounts {
            k,
            draws: vec![0; pair_count(k)],
            self_draws: vec![0; k],
            wins: vec![0; k * k],
        }
    }

    /// Counts with prescribed wins: `wins[i][j]` duels won by `i` against `j`.
    pub fn from_wins(wins: &[Vec<u64>]) -> Result<Self> {
        let k = wins.len();
        let mut counts = DuelCounts::new(k);
        for (i, row) in wins.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidConfig("win table must be square".into()));
            }
            for (j, &w) in row.iter().enumerate() {
                if i == j {
                    continue;
                }
                counts.wins[i * k + j] = w;
                if i > j {
                    counts.draws[Pair::new(i, j).index()] += w + wins[j][i];
                }
            }
        }
        Ok(counts)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn record(&mut self, pair: Pair, first_wins: bool) {
        if pair.is_self() {
            self.self_draws[pair.hi] += 1;
            return;
        }
        self.draws[pair.index()] += 1;
        let (w, l) = if first_wins {
            (pair.hi, pair.lo)
        } else {
            (pair.lo, pair.hi)
        };
        self.wins[w * self.k + l] += 1;
    }

    /// `N_ij`; for `i == j` the number of self-draws of `i`.
    pub fn draws(&self, i: usize, j: usize) -> u64 {
        if i == j {
            self.self_draws[i]
        } else {
            self.draws[Pair::new(i, j).index()]
        }
    }

    pub fn pair_draws(&self, pair: Pair) -> u64 {
        self.draws(pair.hi, pair.lo)
    }

    pub fn wins(&self, i: usize, j: usize) -> u64 {
        self.wins[i * self.k + j]
    }

    /// Total draws including self-draws.
    pub fn total(&self) -> u64 {
        self.draws.iter().sum::<u64>() + self.self_draws.iter().sum::<u64>()
    }

    /// `mu^_ij = wins_ij / N_ij` with `0/0 = 1/2`.
    pub fn estimate(&self, i: usize, j: usize) -> f64 {
        let n = self.draws(i, j);
        if i == j || n == 0 {
            0.5
        } else {
            self.wins(i, j) as f64 / n as f64
        }
    }

    /// The empirical preference matrix (ties allowed).
    pub fn empirical_matrix(&self) -> PreferenceMatrix {
        let lower = distinct_pairs(self.k)
            .map(|p| self.estimate(p.hi, p.lo))
            .collect();
        PreferenceMatrix::from_lower(self.k, lower, TieMode::Tolerant)
            .expect("empirical frequencies are valid probabilities")
    }

    /// `N_ij / ln max(t, 2)` for every distinct pair.
    pub fn normalized(&self, t: u64) -> RateVector {
        let log_t = (t.max(2) as f64).ln();
        let packed = self.draws.iter().map(|&n| n as f64 / log_t).collect();
        RateVector::from_packed(self.k, packed).expect("counts are finite")
    }
}

/// Pairs proposed by one planning step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    /// The empirical winner the plan certifies or explores for.
    pub candidate: usize,
    /// Whether the current counts already certify `candidate`.
    pub certified: bool,
    /// `L_NC`: always contains `(candidate, candidate)`.
    pub pairs: BTreeSet<Pair>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Stage {
    Guard { queue: Vec<Pair>, pos: usize },
    Loop,
}

/// Mutable state of an RMED run: counts, round `t`, and the list bookkeeping.
#[derive(Clone, Debug)]
pub struct RmedState {
    counts: DuelCounts,
    t: u64,
    stage: Stage,
    /// `L_C`, fixed for the current pass; `L_R` is `loop_pairs[cursor..]`.
    loop_pairs: Vec<Pair>,
    cursor: usize,
    /// `L_N`.
    next_pairs: BTreeSet<Pair>,
    candidate: Option<usize>,
}

impl RmedState {
    /// Fresh state at `t = 1` with every distinct pair in the first loop list.
    pub fn new(k: usize, config: &AlgorithmConfig) -> Result<Self> {
        config.check_arms(k)?;
        let mut state = RmedState {
            counts: DuelCounts::new(k),
            t: 1,
            stage: Stage::Loop,
            loop_pairs: distinct_pairs(k).collect(),
            cursor: 0,
            next_pairs: BTreeSet::new(),
            candidate: None,
        };
        state.loop_pairs.sort();
        state.begin_iteration(config);
        Ok(state)
    }

    /// Resumes mid-run at round `t` with the given counts, at the start of a
    /// loop pass over `loop_pairs` (guards are not re-checked first).
    pub fn resume(
        counts: DuelCounts,
        t: u64,
        loop_pairs: impl IntoIterator<Item = Pair>,
        config: &AlgorithmConfig,
    ) -> Result<Self> {
        config.check_arms(counts.k())?;
        let loop_pairs: Vec<Pair> = loop_pairs.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if loop_pairs.is_empty() {
            return Err(Error::InvalidConfig("loop list must not be empty".into()));
        }
        if loop_pairs.iter().any(|p| p.hi >= counts.k()) {
            return Err(Error::InvalidConfig("loop pair outside the arm range".into()));
        }
        Ok(RmedState {
            counts,
            t: t.max(1),
            stage: Stage::Loop,
            loop_pairs,
            cursor: 0,
            next_pairs: BTreeSet::new(),
            candidate: None,
        })
    }

    pub fn k(&self) -> usize {
        self.counts.k()
    }

    /// Current round (1 + number of feedback events consumed).
    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn counts(&self) -> &DuelCounts {
        &self.counts
    }

    pub fn loop_list(&self) -> &[Pair] {
        &self.loop_pairs
    }

    /// `L_R`: pairs of the current pass not drawn yet.
    pub fn remaining(&self) -> &[Pair] {
        match self.stage {
            Stage::Loop => &self.loop_pairs[self.cursor..],
            Stage::Guard { .. } => &self.loop_pairs,
        }
    }

    pub fn next_list(&self) -> &BTreeSet<Pair> {
        &self.next_pairs
    }

    /// Last planned empirical winner.
    pub fn candidate(&self) -> Option<usize> {
        self.candidate
    }

    pub fn in_guard_batch(&self) -> bool {
        matches!(self.stage, Stage::Guard { .. })
    }

    fn guarded(&self, config: &AlgorithmConfig, pair: Pair) -> bool {
        let n = self.counts.pair_draws(pair) as f64;
        let floor = config.alpha * (self.t.max(1) as f64).ln().sqrt();
        let gap = (self.counts.estimate(pair.hi, pair.lo) - 0.5).abs();
        n < floor || gap < config.near_tie_threshold(self.t)
    }

    fn begin_iteration(&mut self, config: &AlgorithmConfig) {
        let queue: Vec<Pair> = distinct_pairs(self.k())
            .filter(|&p| self.guarded(config, p))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        self.cursor = 0;
        self.stage = if queue.is_empty() {
            Stage::Loop
        } else {
            Stage::Guard { queue, pos: 0 }
        };
    }

    /// The pair to draw this round.
    pub fn select_pair(&self) -> Pair {
        match &self.stage {
            Stage::Guard { queue, pos } => queue[*pos],
            Stage::Loop => self.loop_pairs[self.cursor],
        }
    }

    /// Planning step on the current counts and round.
    pub fn plan(&self, config: &AlgorithmConfig) -> Result<Plan> {
        let empirical = self.counts.empirical_matrix();
        let summary = CopelandSummary::tie_tolerant(&empirical);
        let normalized = self.counts.normalized(self.t);
        let kind = match config.variant {
            Variant::Cw => FamilyKind::Cw,
            Variant::Ecw => FamilyKind::Ecw,
            Variant::Random => {
                return Err(Error::InvalidConfig("the random baseline does not plan".into()))
            }
        };
        if summary.winners.is_empty() {
            return Err(Error::InternalInconsistency("empty empirical winner set".into()));
        }
        for &w in &summary.winners {
            let family = ConstraintFamily::with_summary(&empirical, summary.clone(), w, kind)?;
            if check_feasible(&family, &normalized) {
                return Ok(Plan {
                    candidate: w,
                    certified: true,
                    pairs: BTreeSet::from([Pair::new(w, w)]),
                });
            }
        }
        let best = match kind {
            FamilyKind::Cw => best_over_winners(&summary, |w| {
                lp_cw_optimal_with(&empirical, &summary, w, &config.solver)
            })?,
            FamilyKind::Ecw => {
                best_over_winners(&summary, |w| ecw_optimal_with(&empirical, &summary, w))?
            }
        };
        let mut pairs: BTreeSet<Pair> = distinct_pairs(self.k())
            .filter(|p| best.rates.get(p.hi, p.lo) > normalized.get(p.hi, p.lo))
            .collect();
        pairs.insert(Pair::new(best.winner, best.winner));
        Ok(Plan {
            candidate: best.winner,
            certified: false,
            pairs,
        })
    }

    /// Consumes the feedback of `pair` (which must be the pair returned by
    /// [`select_pair`](Self::select_pair)), replans when inside a loop pass,
    /// and advances the round. `first_wins` reports whether `pair.hi` won;
    /// it is ignored for self-pairs.
    pub fn update_and_plan(
        &mut self,
        config: &AlgorithmConfig,
        pair: Pair,
        first_wins: bool,
    ) -> Result<()> {
        if config.variant == Variant::Random {
            self.counts.record(pair, first_wins);
            self.t += 1;
            return Ok(());
        }
        let expected = self.select_pair();
        if pair != expected {
            return Err(Error::InternalInconsistency(format!(
                "drew {pair} but the schedule expects {expected}"
            )));
        }
        self.counts.record(pair, first_wins);
        match &mut self.stage {
            Stage::Guard { queue, pos } => {
                *pos += 1;
                let done = *pos == queue.len();
                self.t += 1;
                if done {
                    self.stage = Stage::Loop;
                }
            }
            Stage::Loop => {
                let plan = self.plan(config)?;
                self.candidate = Some(plan.candidate);
                self.cursor += 1;
                let pending: BTreeSet<Pair> = self.loop_pairs[self.cursor..].iter().copied().collect();
                self.next_pairs
                    .extend(plan.pairs.into_iter().filter(|p| !pending.contains(p)));
                self.t += 1;
                if self.cursor == self.loop_pairs.len() {
                    self.loop_pairs = std::mem::take(&mut self.next_pairs).into_iter().collect();
                    if self.loop_pairs.is_empty() {
                        return Err(Error::InternalInconsistency("empty loop list".into()));
                    }
                    self.begin_iteration(config);
                }
            }
        }
        Ok(())
    }
}

/// Uniform draw over the `K(K-1)/2` distinct pairs.
pub fn random_baseline_select<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Pair {
    Pair::from_index(rng.gen_range(0..pair_count(k)))
}
