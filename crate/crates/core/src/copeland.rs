//! Copeland statistics and per-round regret.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Pair, PreferenceMatrix, TieMode};

/// Superiors, inferiors and loss counts of every arm.
///
/// `superiors[i]` are the arms beating `i`, `inferiors[i]` the arms `i`
/// beats; both are sorted. Tied pairs (tolerant mode only) appear in
/// neither.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopelandSummary {
    pub superiors: Vec<Vec<usize>>,
    pub inferiors: Vec<Vec<usize>>,
    pub losses: Vec<usize>,
    pub winners: Vec<usize>,
    pub ordered_losses: Vec<usize>,
}

impl CopelandSummary {
    /// Summary of a strict-gap matrix.
    pub fn new(matrix: &PreferenceMatrix) -> Result<Self> {
        matrix.require_strict()?;
        Ok(Self::build(matrix))
    }

    pub fn with_mode(matrix: &PreferenceMatrix, ties: TieMode) -> Result<Self> {
        match ties {
            TieMode::Strict => Self::new(matrix),
            TieMode::Tolerant => Ok(Self::build(matrix)),
        }
    }

    /// Summary that tolerates exact ties, as needed for empirical estimates.
    pub fn tie_tolerant(matrix: &PreferenceMatrix) -> Self {
        Self::build(matrix)
    }

    fn build(matrix: &PreferenceMatrix) -> Self {
        let k = matrix.k();
        let mut superiors = vec![Vec::new(); k];
        let mut inferiors = vec![Vec::new(); k];
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let mu = matrix.get(i, j);
                if mu < 0.5 {
                    superiors[i].push(j);
                } else if mu > 0.5 {
                    inferiors[i].push(j);
                }
            }
        }
        let losses: Vec<usize> = superiors.iter().map(Vec::len).collect();
        let best = *losses.iter().min().expect("k >= 1");
        let winners = (0..k).filter(|&i| losses[i] == best).collect();
        let mut ordered_losses = losses.clone();
        ordered_losses.sort_unstable();
        CopelandSummary {
            superiors,
            inferiors,
            losses,
            winners,
            ordered_losses,
        }
    }

    pub fn k(&self) -> usize {
        self.losses.len()
    }

    pub fn winner_count(&self) -> usize {
        self.winners.len()
    }

    /// `L_(1)`, the smallest loss count.
    pub fn min_loss(&self) -> usize {
        self.ordered_losses[0]
    }

    /// `L_(2)`, the second smallest loss count (`L_(1)` when `K = 1`).
    pub fn second_loss(&self) -> usize {
        *self.ordered_losses.get(1).unwrap_or(&self.ordered_losses[0])
    }

    pub fn is_winner(&self, arm: usize) -> bool {
        arm < self.k() && self.losses[arm] == self.min_loss()
    }

    pub fn is_condorcet(&self) -> bool {
        self.min_loss() == 0
    }

    /// Regret of drawing `(i, j)` as an exact fraction `(numerator, denominator)`.
    ///
    /// The denominator is `2(K-1)`; for `K = 1` the fraction is `0/1`.
    pub fn regret_fraction(&self, i: usize, j: usize) -> (u64, u64) {
        let k = self.k();
        if k == 1 {
            return (0, 1);
        }
        let num = self.losses[i] + self.losses[j] - 2 * self.min_loss();
        (num as u64, 2 * (k as u64 - 1))
    }

    /// `r(i,j) = (L_i + L_j - 2 L_(1)) / (2(K-1))`.
    pub fn regret(&self, i: usize, j: usize) -> f64 {
        let (num, den) = self.regret_fraction(i, j);
        num as f64 / den as f64
    }

    pub fn pair_regret(&self, pair: Pair) -> f64 {
        self.regret(pair.hi, pair.lo)
    }
}

/// Bounds-checked [`CopelandSummary::regret`].
pub fn regret_per_pair(summary: &CopelandSummary, i: usize, j: usize) -> Result<f64> {
    let k = summary.k();
    for arm in [i, j] {
        if arm >= k {
            return Err(Error::ArmOutOfRange { arm: arm + 1, k });
        }
    }
    Ok(summary.regret(i, j))
}

/// Cumulative regret kept as an exact rational with denominator `2(K-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegretLedger {
    numerator: u64,
    denominator: u64,
    rounds: u64,
}

impl RegretLedger {
    pub fn new(summary: &CopelandSummary) -> Self {
        RegretLedger {
            numerator: 0,
            denominator: summary.regret_fraction(0, 0).1,
            rounds: 0,
        }
    }

    pub fn record(&mut self, summary: &CopelandSummary, pair: Pair) {
        self.numerator += summary.regret_fraction(pair.hi, pair.lo).0;
        self.rounds += 1;
    }

    pub fn cumulative(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::builtin_dataset;

    #[test]
    fn cyclic_summary() {
        let s = CopelandSummary::new(&builtin_dataset("cyclic").unwrap()).unwrap();
        assert_eq!(s.losses, vec![0, 2, 2, 2]);
        assert_eq!(s.winners, vec![0]);
        assert_eq!(s.winner_count(), 1);
        assert_eq!(s.superiors[1], vec![0, 3]);
        assert_eq!(s.inferiors[0], vec![1, 2, 3]);
        assert!(s.is_condorcet());
    }

    #[test]
    fn multisol_summary() {
        let s = CopelandSummary::new(&builtin_dataset("multisol").unwrap()).unwrap();
        assert_eq!(s.losses, vec![1, 1, 1, 3, 4]);
        assert_eq!(s.winners, vec![0, 1, 2]);
        assert_eq!(s.ordered_losses, vec![1, 1, 1, 3, 4]);
        assert_eq!(s.second_loss(), 1);
    }

    #[test]
    fn single_arm() {
        let m = PreferenceMatrix::parse_csv("0.5", TieMode::Strict).unwrap();
        let s = CopelandSummary::new(&m).unwrap();
        assert_eq!(s.losses, vec![0]);
        assert_eq!(s.winners, vec![0]);
        assert_eq!(s.regret(0, 0), 0.0);
    }

    #[test]
    fn cyclic_regrets() {
        let s = CopelandSummary::new(&builtin_dataset("cyclic").unwrap()).unwrap();
        assert_eq!(regret_per_pair(&s, 0, 0).unwrap(), 0.0);
        assert!((regret_per_pair(&s, 0, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((regret_per_pair(&s, 1, 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.regret_fraction(2, 1), (4, 6));
        assert!(matches!(
            regret_per_pair(&s, 0, 4),
            Err(Error::ArmOutOfRange { arm: 5, k: 4 })
        ));
    }

    #[test]
    fn tied_pairs_count_nowhere() {
        let m = builtin_dataset_tolerant("arxiv");
        assert!(CopelandSummary::new(&m).is_err());
        let s = CopelandSummary::tie_tolerant(&m);
        // arm 4 vs arm 6 is an exact tie
        assert!(!s.superiors[3].contains(&5) && !s.inferiors[3].contains(&5));
        assert_eq!(s.winners, vec![0]);
    }

    fn builtin_dataset_tolerant(name: &str) -> PreferenceMatrix {
        crate::datasets::Dataset::from_name(name)
            .unwrap()
            .load(TieMode::Tolerant)
            .unwrap()
    }

    #[test]
    fn ledger_accumulates_exactly() {
        let s = CopelandSummary::new(&builtin_dataset("cyclic").unwrap()).unwrap();
        let mut ledger = RegretLedger::new(&s);
        for _ in 0..3 {
            ledger.record(&s, Pair::new(2, 1));
            ledger.record(&s, Pair::new(1, 0));
            ledger.record(&s, Pair::new(0, 0));
        }
        assert_eq!(ledger.rounds(), 9);
        assert_eq!(ledger.numerator(), 3 * (4 + 2));
        assert_eq!(ledger.cumulative(), 3.0);
    }
}
