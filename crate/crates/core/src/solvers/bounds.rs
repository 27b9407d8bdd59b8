//! Closed-form regret constants expressed through the minimum gap
//! `Delta = min_{i != j} |mu_ij - 1/2|`.

use crate::copeland::CopelandSummary;
use crate::error::{Error, Result};
use crate::kl::kl_from_half;
use crate::matrix::PreferenceMatrix;

fn gap(matrix: &PreferenceMatrix) -> Result<f64> {
    matrix.require_strict()?;
    let delta = matrix.min_gap();
    if !delta.is_finite() {
        return Err(Error::InvalidMatrix("closed-form bounds need K >= 2".into()));
    }
    Ok(delta)
}

/// Copeland Confidence Bound constant `2K(C + L_(1) + 1) / Delta^2`.
pub fn ccb_bound(matrix: &PreferenceMatrix) -> Result<f64> {
    let delta = gap(matrix)?;
    let s = CopelandSummary::new(matrix)?;
    let k = matrix.k() as f64;
    let c = s.winner_count() as f64;
    let l1 = s.min_loss() as f64;
    Ok(2.0 * k * (c + l1 + 1.0) / (delta * delta))
}

/// Explicit upper bound on the relaxed constant for candidate `winner`:
/// `(1 / d_KL(1/2 + Delta, 1/2)) * sum_{i2 != i1} (1 + L_i2 / (L_i2 - L_(1) + 1))`.
pub fn ecw_explicit_bound(matrix: &PreferenceMatrix, winner: usize) -> Result<f64> {
    let delta = gap(matrix)?;
    let s = CopelandSummary::new(matrix)?;
    if winner >= s.k() {
        return Err(Error::ArmOutOfRange {
            arm: winner + 1,
            k: s.k(),
        });
    }
    if !s.is_winner(winner) {
        return Err(Error::NotAWinner { arm: winner + 1 });
    }
    let l1 = s.min_loss() as f64;
    let sum: f64 = (0..s.k())
        .filter(|&i| i != winner)
        .map(|i| {
            let li = s.losses[i] as f64;
            1.0 + li / (li - l1 + 1.0)
        })
        .sum();
    Ok(sum / kl_from_half(0.5 + delta))
}

/// Winner-independent bound `(K / d_KL(1/2 + Delta, 1/2)) ((L_(1) + 3)/2 + L_(1)^2 / K)`.
///
/// It dominates [`ecw_explicit_bound`] for `K <= 6`. For larger Condorcet
/// tournaments whose other arms all lose about `K/2` duels the explicit
/// bound can exceed it (e.g. `K = 7`).
pub fn ecw_worstcase_bound(matrix: &PreferenceMatrix) -> Result<f64> {
    let delta = gap(matrix)?;
    let s = CopelandSummary::new(matrix)?;
    let k = matrix.k() as f64;
    let l1 = s.min_loss() as f64;
    Ok(k / kl_from_half(0.5 + delta) * ((l1 + 3.0) / 2.0 + l1 * l1 / k))
}
