//! Optimal exploration rates and leading regret constants.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::constraints::{ConstraintFamily, FamilyKind, RateVector};
use crate::copeland::CopelandSummary;
use crate::error::{Error, Result};
use crate::kl::kl_from_half;
use crate::matrix::{distinct_pairs, pair_count, Pair, PreferenceMatrix};
use crate::solvers::simplex::{simplex_solve, Covering};
use crate::solvers::subproblem::{solve_subproblem, SubproblemInstance};

/// Default largest `K` for which the exact LP is attempted.
pub const DEFAULT_K_MAX: usize = 8;
/// Hard ceiling: constraint pair sets are kept as 128-bit masks.
pub const HARD_K_MAX: usize = 16;
/// Environment variable overriding [`DEFAULT_K_MAX`] in the command-line tool.
pub const K_MAX_ENV: &str = "COPELAND_K_MAX";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub k_max: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            k_max: DEFAULT_K_MAX,
        }
    }
}

impl SolverConfig {
    pub fn new(k_max: usize) -> Result<Self> {
        if k_max == 0 || k_max > HARD_K_MAX {
            return Err(Error::InvalidConfig(format!(
                "K_max must be in 1..={HARD_K_MAX}, got {k_max}"
            )));
        }
        Ok(SolverConfig { k_max })
    }

    /// Reads [`K_MAX_ENV`], falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(K_MAX_ENV) {
            Ok(v) => {
                let k = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("{K_MAX_ENV}=`{v}` is not an integer")))?;
                Self::new(k)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn check(&self, k: usize) -> Result<()> {
        if k > self.k_max {
            Err(Error::TooLarge {
                k,
                k_max: self.k_max,
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    LpExact,
    EcwClosedForm,
}

/// Optimal rates for one candidate winner and the resulting constant
/// `sum r(i,j) q_ij` (regret per unit of `ln T`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalExploration {
    #[serde(with = "one_based")]
    pub winner: usize,
    pub constant: f64,
    pub rates: RateVector,
    pub exactness: Exactness,
}

mod one_based {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &usize, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(*v as u64 + 1)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
        let v = u64::deserialize(d)?;
        if v == 0 {
            return Err(serde::de::Error::custom("arm indices are 1-based"));
        }
        Ok(v as usize - 1)
    }
}

fn require_winner(summary: &CopelandSummary, winner: usize) -> Result<()> {
    if winner >= summary.k() {
        return Err(Error::ArmOutOfRange {
            arm: winner + 1,
            k: summary.k(),
        });
    }
    if !summary.is_winner(winner) {
        return Err(Error::NotAWinner { arm: winner + 1 });
    }
    Ok(())
}

/// Relaxed-program rates for `winner`, assembled in closed form.
///
/// Rates against every arm the winner beats are pinned at `1/d_KL`; for each
/// rival the covering subproblem over its remaining superiors is solved by
/// prefix search. Exact ties (possible in empirical matrices) carry no
/// divergence and are left out.
pub fn ecw_optimal(matrix: &PreferenceMatrix, winner: usize) -> Result<OptimalExploration> {
    ecw_optimal_with(matrix, &CopelandSummary::tie_tolerant(matrix), winner)
}

pub(crate) fn ecw_optimal_with(
    matrix: &PreferenceMatrix,
    summary: &CopelandSummary,
    winner: usize,
) -> Result<OptimalExploration> {
    require_winner(summary, winner)?;
    let k = matrix.k();
    let div = |i: usize, j: usize| kl_from_half(matrix.get(i, j));
    let mut rates = RateVector::zeros(k);
    for &j in &summary.inferiors[winner] {
        rates.set(winner, j, 1.0 / div(winner, j));
    }
    let own_losses = summary.losses[winner];
    for rival in (0..k).filter(|&i| i != winner) {
        let pool: Vec<usize> = summary.superiors[rival]
            .iter()
            .copied()
            .filter(|&j| j != winner)
            .collect();
        let need = summary.losses[rival] + 1 - own_losses;
        if need > pool.len() {
            continue;
        }
        let instance = SubproblemInstance {
            costs: pool
                .iter()
                .map(|&j| summary.regret(j, rival) / div(j, rival))
                .collect(),
            slack: pool.len() - need,
        };
        let solution = solve_subproblem(&instance);
        for (&j, &y) in pool.iter().zip(&solution.weights) {
            if y == 0.0 {
                continue;
            }
            // rival subproblems and pins touch disjoint pairs
            if rates.get(j, rival) != 0.0 {
                return Err(Error::InternalInconsistency(format!(
                    "pair {} assigned twice",
                    Pair::new(j, rival)
                )));
            }
            rates.set(j, rival, y / div(j, rival));
        }
    }
    Ok(OptimalExploration {
        winner,
        constant: rates.regret_rate(summary),
        rates,
        exactness: Exactness::EcwClosedForm,
    })
}

/// Exact lower-bound rates for `winner`: builds the full constraint family,
/// drops duplicated and dominated pair sets, and solves the LP with boxes
/// `0 <= q_ij <= 1/d_KL(mu_ij, 1/2)`.
pub fn lp_cw_optimal(
    matrix: &PreferenceMatrix,
    winner: usize,
    config: &SolverConfig,
) -> Result<OptimalExploration> {
    lp_cw_optimal_with(matrix, &CopelandSummary::tie_tolerant(matrix), winner, config)
}

pub(crate) fn lp_cw_optimal_with(
    matrix: &PreferenceMatrix,
    summary: &CopelandSummary,
    winner: usize,
    config: &SolverConfig,
) -> Result<OptimalExploration> {
    require_winner(summary, winner)?;
    let k = matrix.k();
    config.check(k)?;
    if k > HARD_K_MAX {
        return Err(Error::TooLarge {
            k,
            k_max: HARD_K_MAX,
        });
    }
    let family = ConstraintFamily::with_summary(matrix, summary.clone(), winner, FamilyKind::Cw)?;

    let mut seen = HashSet::new();
    let mut masks: Vec<u128> = family
        .descriptors()
        .map(|d| {
            d.pairs(winner)
                .iter()
                .fold(0u128, |m, p| m | (1u128 << p.index()))
        })
        .filter(|m| seen.insert(*m))
        .collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut minimal: Vec<u128> = Vec::new();
    for m in masks {
        if !minimal.iter().any(|&kept| kept & m == kept) {
            minimal.push(m);
        }
    }

    let divergence: Vec<f64> = matrix.lower().iter().map(|&v| kl_from_half(v)).collect();
    // only pairs with a strict preference can appear in a constraint
    let variables: Vec<Pair> = distinct_pairs(k)
        .filter(|p| divergence[p.index()] > 0.0)
        .collect();
    let mut slot = vec![usize::MAX; pair_count(k)];
    for (v, p) in variables.iter().enumerate() {
        slot[p.index()] = v;
    }
    let objective: Vec<f64> = variables.iter().map(|&p| summary.pair_regret(p)).collect();
    let upper: Vec<f64> = variables
        .iter()
        .map(|p| 1.0 / divergence[p.index()])
        .collect();
    let constraints: Vec<Covering> = minimal
        .iter()
        .map(|&mask| Covering {
            terms: (0..pair_count(k))
                .filter(|idx| mask >> idx & 1 == 1)
                .map(|idx| (slot[idx], divergence[idx]))
                .collect(),
        })
        .collect();

    let solution = simplex_solve(&objective, &constraints, &upper)?;
    let mut rates = RateVector::zeros(k);
    for (p, x) in variables.iter().zip(solution.x) {
        rates.set(p.hi, p.lo, x);
    }
    Ok(OptimalExploration {
        winner,
        constant: rates.regret_rate(summary),
        rates,
        exactness: Exactness::LpExact,
    })
}

/// Minimum over the Copeland winners; ties go to the smallest arm index.
pub(crate) fn best_over_winners(
    summary: &CopelandSummary,
    mut solve: impl FnMut(usize) -> Result<OptimalExploration>,
) -> Result<OptimalExploration> {
    let mut best: Option<OptimalExploration> = None;
    for &w in &summary.winners {
        let candidate = solve(w)?;
        if best
            .as_ref()
            .is_none_or(|b| candidate.constant < b.constant)
        {
            best = Some(candidate);
        }
    }
    best.ok_or_else(|| Error::InternalInconsistency("no Copeland winner".into()))
}

/// The asymptotic regret lower bound: `min_{i1 in winners} lambda_{i1}`.
/// The returned exploration belongs to the minimizing winner.
pub fn lower_bound(matrix: &PreferenceMatrix, config: &SolverConfig) -> Result<OptimalExploration> {
    let summary = CopelandSummary::new(matrix)?;
    config.check(matrix.k())?;
    best_over_winners(&summary, |w| lp_cw_optimal_with(matrix, &summary, w, config))
}

/// The relaxed program's best exploration over the Copeland winners.
pub fn ecw_best(matrix: &PreferenceMatrix) -> Result<OptimalExploration> {
    let summary = CopelandSummary::new(matrix)?;
    best_over_winners(&summary, |w| ecw_optimal_with(matrix, &summary, w))
}

/// Leading constant of ECW-RMED's regret bound, `min_{i1} lambda~_{i1}`.
pub fn ecw_constant(matrix: &PreferenceMatrix) -> Result<f64> {
    Ok(ecw_best(matrix)?.constant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::check_feasible;
    use crate::datasets::builtin_dataset;
    use crate::kl::kl_bernoulli;
    use crate::matrix::TieMode;

    fn two_arm() -> PreferenceMatrix {
        PreferenceMatrix::parse_csv("0.5,0.6\n0.4,0.5", TieMode::Strict).unwrap()
    }

    #[test]
    fn cyclic_ecw_rates() {
        let m = builtin_dataset("cyclic").unwrap();
        let opt = ecw_optimal(&m, 0).unwrap();
        for j in 1..4 {
            assert!((opt.rates.get(0, j) - 49.6635).abs() < 1e-3);
        }
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            assert_eq!(opt.rates.get(i, j), 0.0);
        }
        assert!((opt.constant - 49.66).abs() < 0.05);
        assert_eq!(opt.exactness, Exactness::EcwClosedForm);
    }

    #[test]
    fn cyclic_lp_matches_half_budget_solution() {
        let m = builtin_dataset("cyclic").unwrap();
        let opt = lp_cw_optimal(&m, 0, &SolverConfig::default()).unwrap();
        let near = kl_bernoulli(0.6, 0.5).unwrap();
        let far = kl_bernoulli(0.9, 0.5).unwrap();
        let expected = 3.0 * (1.0 / 3.0) / (2.0 * near) + 3.0 * (2.0 / 3.0) / (2.0 * far);
        assert!((opt.constant - expected).abs() <= 1e-6 * expected);
        assert!((opt.constant - 27.55).abs() < 0.2);
        let fam = ConstraintFamily::new(&m, 0, FamilyKind::Cw).unwrap();
        assert!(check_feasible(&fam, &opt.rates));
    }

    #[test]
    fn two_arm_constants_agree() {
        let m = two_arm();
        let d = kl_bernoulli(0.6, 0.5).unwrap();
        let ecw = ecw_optimal(&m, 0).unwrap();
        let lp = lp_cw_optimal(&m, 0, &SolverConfig::default()).unwrap();
        assert!((ecw.rates.get(0, 1) - 1.0 / d).abs() < 1e-9);
        assert!((ecw.constant - 0.5 / d).abs() < 1e-9);
        assert!((ecw.constant - 24.83).abs() < 0.05);
        assert!((lp.constant - ecw.constant).abs() < 1e-9);
    }

    #[test]
    fn multisol_relaxation_is_tight() {
        let m = builtin_dataset("multisol").unwrap();
        for w in 0..3 {
            let ecw = ecw_optimal(&m, w).unwrap();
            let lp = lp_cw_optimal(&m, w, &SolverConfig::default()).unwrap();
            assert!(
                (ecw.constant - lp.constant).abs() <= 1e-6 * lp.constant,
                "winner {w}: {} vs {}",
                ecw.constant,
                lp.constant
            );
        }
    }

    #[test]
    fn lower_bound_picks_minimizing_winner() {
        let m = builtin_dataset("cyclic").unwrap();
        let lb = lower_bound(&m, &SolverConfig::default()).unwrap();
        assert_eq!(lb.winner, 0);
        assert!((lb.constant - 27.55).abs() < 0.2);
        let m = builtin_dataset("multisol").unwrap();
        let lb = lower_bound(&m, &SolverConfig::default()).unwrap();
        let best_ecw = ecw_constant(&m).unwrap();
        assert!((lb.constant - best_ecw).abs() <= 1e-6 * lb.constant);
    }

    #[test]
    fn size_gate() {
        let m = builtin_dataset("sushi").unwrap();
        assert!(matches!(
            lower_bound(&m, &SolverConfig::default()),
            Err(Error::TooLarge { k: 16, k_max: 8 })
        ));
        assert!(ecw_constant(&m).unwrap() > 0.0);
        assert!(SolverConfig::new(17).is_err());
    }

    #[test]
    fn non_winner_rejected() {
        let m = builtin_dataset("cyclic").unwrap();
        assert!(matches!(ecw_optimal(&m, 3), Err(Error::NotAWinner { arm: 4 })));
        assert!(matches!(
            lp_cw_optimal(&m, 1, &SolverConfig::default()),
            Err(Error::NotAWinner { arm: 2 })
        ));
    }

    #[test]
    fn gap_relaxation_is_far_from_optimal() {
        let m = builtin_dataset("gap").unwrap();
        let lb = lower_bound(&m, &SolverConfig::default()).unwrap();
        let ecw = ecw_constant(&m).unwrap();
        assert!(ecw / lb.constant > 100.0, "{ecw} / {}", lb.constant);
    }

    #[test]
    fn json_shape() {
        let m = builtin_dataset("cyclic").unwrap();
        let opt = ecw_optimal(&m, 0).unwrap();
        let v: serde_json::Value = serde_json::to_value(&opt).unwrap();
        assert_eq!(v["winner"], 1);
        assert!(v["rates"]["2-1"].as_f64().unwrap() > 49.0);
        let back: OptimalExploration = serde_json::from_value(v).unwrap();
        assert_eq!(back, opt);
    }
}
