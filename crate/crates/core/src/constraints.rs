//! Divergence constraint families certifying a candidate Copeland winner.
//!
//! For a candidate winner `i1`, every descriptor `(i2, l, I, S)` names a set
//! of pairs `P_IS = {(i1, j) : j in I} ∪ {(i2, j) : j in S}`. Flipping every
//! pair in `P_IS` would leave `i2` with at most `l` losses and `i1` with at
//! least `l + 1`, dethroning `i1`. Ruling that out with confidence `1/t`
//! requires
//!
//! ```text
//!     sum_{(i,j) in P_IS} q_ij * d_KL(nu_ij, 1/2) >= 1
//! ```
//!
//! where `q_ij` is the number of draws of `(i, j)` per unit of `ln t`.
//!
//! Two families are provided:
//!
//! * [`FamilyKind::Cw`] enumerates every descriptor with
//!   `l in max(0, L_(1) - 1) ..= L_(2)`, `I ⊆ H_i1` of size `l + 1 - L_(1)`
//!   and `S ⊆ B_i2 \ {i1}` of size `max(0, L_i2 - l - [i2 in I])`.
//! * [`FamilyKind::Ecw`] pins `q_{i1 j} d_KL = 1` for every `j` that `i1`
//!   beats, and for each rival `i2` requires every `S ⊆ B_i2 \ {i1}` of size
//!   `L_i2 - L_i1 + 1` to carry total weight at least one.
//!
//! Descriptors whose required subset size exceeds the available set are
//! vacuous and never generated. Enumeration is lazy; [`check_feasible`]
//! never enumerates, it sorts weighted rates and tests the binding subsets.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::copeland::CopelandSummary;
use crate::error::{Error, Result};
use crate::kl::kl_from_half;
use crate::matrix::{distinct_pairs, pair_count, Pair, PreferenceMatrix};

/// A constraint holds iff its left side is at least `1 - FEASIBILITY_TOLERANCE`.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-12;

/// Exploration rates `q_ij`, one per distinct pair.
#[derive(Clone, Debug, PartialEq)]
pub struct RateVector {
    k: usize,
    rates: Vec<f64>,
}

impl RateVector {
    pub fn zeros(k: usize) -> Self {
        RateVector {
            k,
            rates: vec![0.0; pair_count(k)],
        }
    }

    /// Rates from packed values (see [`Pair::index`]).
    pub fn from_packed(k: usize, rates: Vec<f64>) -> Result<Self> {
        if rates.len() != pair_count(k) {
            return Err(Error::InvalidConfig(format!(
                "rate vector for K = {k} needs {} entries, got {}",
                pair_count(k),
                rates.len()
            )));
        }
        if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::InvalidConfig("rates must be finite and >= 0".into()));
        }
        Ok(RateVector { k, rates })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.rates[Pair::new(i, j).index()]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.rates[Pair::new(i, j).index()] = value;
    }

    pub fn packed(&self) -> &[f64] {
        &self.rates
    }

    /// Nonzero entries as `(pair, rate)`.
    pub fn support(&self) -> impl Iterator<Item = (Pair, f64)> + '_ {
        distinct_pairs(self.k)
            .map(|p| (p, self.rates[p.index()]))
            .filter(|(_, r)| *r > 0.0)
    }

    /// `sum_{i>j} r(i,j) q_ij`.
    pub fn regret_rate(&self, summary: &CopelandSummary) -> f64 {
        distinct_pairs(self.k)
            .map(|p| summary.pair_regret(p) * self.rates[p.index()])
            .sum()
    }
}

impl Serialize for RateVector {
    /// JSON map `"i-j" -> rate` (1-based, `i > j`).
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.rates.len()))?;
        for p in distinct_pairs(self.k) {
            map.serialize_entry(&p.to_string(), &self.rates[p.index()])?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for RateVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let map = BTreeMap::<String, f64>::deserialize(d)?;
        let mut entries = Vec::with_capacity(map.len());
        let mut k = 1;
        for (key, value) in map {
            let (a, b) = key
                .split_once('-')
                .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
                .filter(|(a, b)| *b >= 1 && a > b)
                .ok_or_else(|| D::Error::custom(format!("bad pair key `{key}`")))?;
            k = k.max(a);
            entries.push((Pair::new(a - 1, b - 1), value));
        }
        let mut rv = RateVector::zeros(k);
        if entries.len() != pair_count(k) {
            return Err(D::Error::custom("rate map must list every pair"));
        }
        for (p, v) in entries {
            rv.rates[p.index()] = v;
        }
        Ok(rv)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Cw,
    Ecw,
}

/// One quantified constraint `(i2, l, I, S)`.
///
/// ECW descriptors have an empty `inferiors` set and no level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Descriptor {
    pub rival: usize,
    pub level: Option<usize>,
    pub inferiors: Vec<usize>,
    pub superiors: Vec<usize>,
}

impl Descriptor {
    /// `P_IS` for the candidate `winner`.
    pub fn pairs(&self, winner: usize) -> Vec<Pair> {
        self.inferiors
            .iter()
            .map(|&j| Pair::new(winner, j))
            .chain(self.superiors.iter().map(|&j| Pair::new(self.rival, j)))
            .collect()
    }
}

/// The constraint set certifying `winner` under the matrix `nu`.
#[derive(Clone, Debug)]
pub struct ConstraintFamily {
    kind: FamilyKind,
    winner: usize,
    summary: CopelandSummary,
    divergence: Vec<f64>,
}

/// The family of the exact lower-bound program.
pub fn cw_constraints(matrix: &PreferenceMatrix, winner: usize) -> Result<ConstraintFamily> {
    ConstraintFamily::new(matrix, winner, FamilyKind::Cw)
}

/// The relaxed family with pinned winner rates.
pub fn ecw_constraints(matrix: &PreferenceMatrix, winner: usize) -> Result<ConstraintFamily> {
    ConstraintFamily::new(matrix, winner, FamilyKind::Ecw)
}

impl ConstraintFamily {
    /// Ties in `matrix` are tolerated: tied pairs belong to neither the
    /// superiors nor the inferiors and never enter a constraint.
    pub fn new(matrix: &PreferenceMatrix, winner: usize, kind: FamilyKind) -> Result<Self> {
        let summary = CopelandSummary::tie_tolerant(matrix);
        Self::with_summary(matrix, summary, winner, kind)
    }

    pub fn with_summary(
        matrix: &PreferenceMatrix,
        summary: CopelandSummary,
        winner: usize,
        kind: FamilyKind,
    ) -> Result<Self> {
        if winner >= matrix.k() {
            return Err(Error::ArmOutOfRange {
                arm: winner + 1,
                k: matrix.k(),
            });
        }
        if !summary.is_winner(winner) {
            return Err(Error::NotAWinner { arm: winner + 1 });
        }
        let divergence = matrix.lower().iter().map(|&v| kl_from_half(v)).collect();
        Ok(ConstraintFamily {
            kind,
            winner,
            summary,
            divergence,
        })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn winner(&self) -> usize {
        self.winner
    }

    pub fn summary(&self) -> &CopelandSummary {
        &self.summary
    }

    pub fn k(&self) -> usize {
        self.summary.k()
    }

    /// `d_KL(nu_ij, 1/2)` for a distinct pair.
    pub fn divergence(&self, i: usize, j: usize) -> f64 {
        self.divergence[Pair::new(i, j).index()]
    }

    /// Arms the winner's rate is pinned against (ECW only).
    pub fn pins(&self) -> &[usize] {
        match self.kind {
            FamilyKind::Cw => &[],
            FamilyKind::Ecw => &self.summary.inferiors[self.winner],
        }
    }

    /// `B_i2 \ {i1}`.
    pub fn rival_pool(&self, rival: usize) -> Vec<usize> {
        self.summary.superiors[rival]
            .iter()
            .copied()
            .filter(|&j| j != self.winner)
            .collect()
    }

    /// Required `|S|` of the ECW constraints for `rival`, or `None` if vacuous.
    pub fn ecw_requirement(&self, rival: usize) -> Option<usize> {
        let need = self.summary.losses[rival] + 1 - self.summary.losses[self.winner];
        (need <= self.rival_pool(rival).len()).then_some(need)
    }

    /// Level range `max(0, L_(1) - 1) ..= L_(2)` of the CW family.
    pub fn levels(&self) -> std::ops::RangeInclusive<usize> {
        self.summary.min_loss().saturating_sub(1)..=self.summary.second_loss()
    }

    /// Lazily enumerates every non-vacuous descriptor.
    pub fn descriptors(&self) -> Box<dyn Iterator<Item = Descriptor> + '_> {
        let rivals = (0..self.k()).filter(move |&i2| i2 != self.winner);
        match self.kind {
            FamilyKind::Ecw => Box::new(rivals.flat_map(move |i2| {
                let pool = self.rival_pool(i2);
                let need = self.ecw_requirement(i2);
                need.into_iter().flat_map(move |need| {
                    pool.clone()
                        .into_iter()
                        .combinations(need)
                        .map(move |s| Descriptor {
                            rival: i2,
                            level: None,
                            inferiors: Vec::new(),
                            superiors: s,
                        })
                })
            })),
            FamilyKind::Cw => {
                let l1 = self.summary.min_loss();
                let inferiors = &self.summary.inferiors[self.winner];
                Box::new(rivals.flat_map(move |i2| {
                    let pool = self.rival_pool(i2);
                    let loss2 = self.summary.losses[i2];
                    self.levels().flat_map(move |l| {
                        let pool = pool.clone();
                        let size_i = l + 1 - l1;
                        inferiors
                            .iter()
                            .copied()
                            .combinations(size_i)
                            .flat_map(move |set_i| {
                                let in_i = set_i.contains(&i2) as usize;
                                let size_s = loss2.saturating_sub(l + in_i);
                                pool.clone()
                                    .into_iter()
                                    .combinations(size_s)
                                    .map(move |set_s| Descriptor {
                                        rival: i2,
                                        level: Some(l),
                                        inferiors: set_i.clone(),
                                        superiors: set_s,
                                    })
                            })
                    })
                }))
            }
        }
    }

    /// Left side `sum_{P_IS} q_ij d_KL(nu_ij, 1/2)` of one descriptor.
    pub fn constraint_value(&self, descriptor: &Descriptor, rates: &RateVector) -> f64 {
        descriptor
            .pairs(self.winner)
            .into_iter()
            .map(|p| rates.get(p.hi, p.lo) * self.divergence(p.hi, p.lo))
            .sum()
    }

    fn weight(&self, rates: &RateVector, i: usize, j: usize) -> f64 {
        rates.get(i, j) * self.divergence(i, j)
    }

    /// Ascending weighted rates `q_{i j} d_KL` of `arm` against `others`, as prefix sums.
    fn sorted_prefix(&self, rates: &RateVector, arm: usize, others: &[usize]) -> Vec<f64> {
        let mut w: Vec<f64> = others.iter().map(|&j| self.weight(rates, arm, j)).collect();
        w.sort_by(f64::total_cmp);
        let mut prefix = Vec::with_capacity(w.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for x in w {
            acc += x;
            prefix.push(acc);
        }
        prefix
    }

    /// Smallest constraint value over the whole family, `None` if the family
    /// is empty. ECW pins are treated as one-sided `>=` constraints.
    pub fn min_slack(&self, rates: &RateVector) -> Option<f64> {
        let mut worst: Option<f64> = None;
        let mut consider = |v: f64| worst = Some(worst.map_or(v, |w| w.min(v)));
        match self.kind {
            FamilyKind::Ecw => {
                for &j in self.pins() {
                    consider(self.weight(rates, self.winner, j));
                }
                for i2 in (0..self.k()).filter(|&i| i != self.winner) {
                    if let Some(need) = self.ecw_requirement(i2) {
                        let prefix = self.sorted_prefix(rates, i2, &self.rival_pool(i2));
                        consider(prefix[need]);
                    }
                }
            }
            FamilyKind::Cw => {
                let l1 = self.summary.min_loss();
                let inferiors = &self.summary.inferiors[self.winner];
                for i2 in (0..self.k()).filter(|&i| i != self.winner) {
                    let pool = self.rival_pool(i2);
                    let pool_prefix = self.sorted_prefix(rates, i2, &pool);
                    let rival_is_inferior = inferiors.contains(&i2);
                    let others: Vec<usize> =
                        inferiors.iter().copied().filter(|&j| j != i2).collect();
                    let inf_prefix = self.sorted_prefix(rates, self.winner, &others);
                    let loss2 = self.summary.losses[i2];
                    for l in self.levels() {
                        let size_i = l + 1 - l1;
                        // i2 not in I
                        let size_s = loss2.saturating_sub(l);
                        if size_i <= others.len() && size_s <= pool.len() {
                            consider(inf_prefix[size_i] + pool_prefix[size_s]);
                        }
                        // i2 in I
                        if rival_is_inferior && size_i >= 1 && size_i - 1 <= others.len() {
                            let size_s = loss2.saturating_sub(l + 1);
                            if size_s <= pool.len() {
                                consider(
                                    self.weight(rates, self.winner, i2)
                                        + inf_prefix[size_i - 1]
                                        + pool_prefix[size_s],
                                );
                            }
                        }
                    }
                }
            }
        }
        worst
    }
}

/// Whether `rates` satisfy every constraint of `family`, up to
/// [`FEASIBILITY_TOLERANCE`]. Runs in `O(K^2 log K)` per rival without
/// enumerating subsets.
pub fn check_feasible(family: &ConstraintFamily, rates: &RateVector) -> bool {
    family
        .min_slack(rates)
        .is_none_or(|v| v >= 1.0 - FEASIBILITY_TOLERANCE)
}
