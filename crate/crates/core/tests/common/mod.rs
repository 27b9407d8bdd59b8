//! Independent oracles and random instance generators shared by the
//! integration tests. Nothing here calls into the crate's constraint or
//! solver code.

#![allow(dead_code)]

use rand::Rng;

use copeland_rmed::constraints::{FamilyKind, RateVector};
use copeland_rmed::matrix::{PreferenceMatrix, TieMode};

pub const TOL: f64 = 1e-12;

/// `d_KL(p, 1/2)` written out directly.
pub fn kl_half(p: f64) -> f64 {
    let term = |x: f64| if x == 0.0 { 0.0 } else { x * (2.0 * x).ln() };
    term(p) + term(1.0 - p)
}

/// Loss sets read straight off the matrix: `beaten_by[i]` holds every `j`
/// with `mu_ij < 1/2`, `beats[i]` every `j` with `mu_ij > 1/2`.
pub struct Tournament {
    pub beaten_by: Vec<Vec<usize>>,
    pub beats: Vec<Vec<usize>>,
}

impl Tournament {
    pub fn of(m: &PreferenceMatrix) -> Self {
        let k = m.k();
        let beaten_by = (0..k)
            .map(|i| (0..k).filter(|&j| j != i && m.get(i, j) < 0.5).collect())
            .collect();
        let beats = (0..k)
            .map(|i| (0..k).filter(|&j| j != i && m.get(i, j) > 0.5).collect())
            .collect();
        Tournament { beaten_by, beats }
    }

    pub fn losses(&self) -> Vec<usize> {
        self.beaten_by.iter().map(Vec::len).collect()
    }

    pub fn sorted_losses(&self) -> Vec<usize> {
        let mut l = self.losses();
        l.sort_unstable();
        l
    }
}

/// All subsets of `items` with exactly `size` elements, by bitmask.
pub fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    let n = items.len();
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == size)
        .map(|m| (0..n).filter(|b| m >> b & 1 == 1).map(|b| items[b]).collect())
        .collect()
}

fn weighted(m: &PreferenceMatrix, q: &RateVector, a: usize, b: usize) -> f64 {
    q.get(a, b) * kl_half(m.get(a, b))
}

/// Evaluates every quantified constraint of the family one by one.
pub fn brute_force_feasible(
    m: &PreferenceMatrix,
    winner: usize,
    kind: FamilyKind,
    q: &RateVector,
) -> bool {
    let t = Tournament::of(m);
    let k = m.k();
    let l = t.losses();
    let sorted = t.sorted_losses();
    let l1 = sorted[0];
    let l2 = *sorted.get(1).unwrap_or(&sorted[0]);
    assert_eq!(l[winner], l1, "oracle called on a non-winner");
    match kind {
        FamilyKind::Cw => {
            for level in l1.saturating_sub(1)..=l2 {
                let size_i = level + 1 - l1;
                for inferiors in subsets(&t.beats[winner], size_i) {
                    let base: f64 = inferiors.iter().map(|&j| weighted(m, q, winner, j)).sum();
                    for rival in (0..k).filter(|&r| r != winner) {
                        let pool: Vec<usize> =
                            t.beaten_by[rival].iter().copied().filter(|&j| j != winner).collect();
                        let indicator = usize::from(inferiors.contains(&rival));
                        let size_s = l[rival].saturating_sub(level + indicator);
                        for sup in subsets(&pool, size_s) {
                            let lhs = base + sup.iter().map(|&j| weighted(m, q, rival, j)).sum::<f64>();
                            if lhs < 1.0 - TOL {
                                return false;
                            }
                        }
                    }
                }
            }
            true
        }
        FamilyKind::Ecw => {
            for &j in &t.beats[winner] {
                if weighted(m, q, winner, j) < 1.0 - TOL {
                    return false;
                }
            }
            for rival in (0..k).filter(|&r| r != winner) {
                let pool: Vec<usize> =
                    t.beaten_by[rival].iter().copied().filter(|&j| j != winner).collect();
                let need = l[rival] + 1 - l[winner];
                if need > pool.len() {
                    continue;
                }
                for sup in subsets(&pool, need) {
                    let lhs: f64 = sup.iter().map(|&j| weighted(m, q, rival, j)).sum();
                    if lhs < 1.0 - TOL {
                        return false;
                    }
                }
            }
            true
        }
    }
}

/// Random matrix whose entries all satisfy `|mu - 1/2| >= min_gap`.
pub fn random_strict_matrix<R: Rng>(rng: &mut R, k: usize, min_gap: f64) -> PreferenceMatrix {
    let lower: Vec<f64> = (0..k * (k - 1) / 2)
        .map(|_| {
            let offset = rng.gen_range(min_gap..0.45);
            if rng.gen_bool(0.5) {
                0.5 + offset
            } else {
                0.5 - offset
            }
        })
        .collect();
    PreferenceMatrix::from_lower(k, lower, TieMode::Strict).expect("strict by construction")
}

/// Random strict matrix with at least two Copeland winners.
pub fn random_multi_winner_matrix<R: Rng>(rng: &mut R, k: usize) -> PreferenceMatrix {
    loop {
        let m = random_strict_matrix(rng, k, 0.05);
        let l = Tournament::of(&m).losses();
        let best = *l.iter().min().unwrap();
        if l.iter().filter(|&&x| x == best).count() >= 2 {
            return m;
        }
    }
}

pub fn winners(m: &PreferenceMatrix) -> Vec<usize> {
    let l = Tournament::of(m).losses();
    let best = *l.iter().min().unwrap();
    (0..m.k()).filter(|&i| l[i] == best).collect()
}
