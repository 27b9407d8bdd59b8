//! The per-rival covering problem of the relaxed (ECW) program:
//!
//! ```text
//!     minimize    sum_j c_j y_j
//!     subject to  sum_{j in S} y_j >= 1   for every S with |S| = n - k
//! ```
//!
//! Some optimum puts `1/(h - k)` on the `h` cheapest elements and zero
//! elsewhere, for some `h > k`, so checking the `n - k` candidate prefixes
//! after one sort solves it exactly.

use serde::{Deserialize, Serialize};

/// Costs `c_j >= 0` over an index set and the slack `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubproblemInstance {
    pub costs: Vec<f64>,
    pub slack: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubproblemSolution {
    /// `y*_j`, aligned with the instance's costs.
    pub weights: Vec<f64>,
    pub objective: f64,
    /// Size of the optimal prefix (0 when the constraint set is empty).
    pub prefix: usize,
}

/// Solves a [`SubproblemInstance`].
///
/// With `k >= n` there are no constraints and the zero vector is optimal.
/// Ties between prefixes resolve to the smallest `h`.
pub fn solve_subproblem(instance: &SubproblemInstance) -> SubproblemSolution {
    let n = instance.costs.len();
    let k = instance.slack;
    if k >= n {
        return SubproblemSolution {
            weights: vec![0.0; n],
            objective: 0.0,
            prefix: 0,
        };
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| instance.costs[a].total_cmp(&instance.costs[b]).then(a.cmp(&b)));

    let mut prefix_cost = 0.0;
    let mut best: Option<(usize, f64)> = None;
    for (pos, &j) in order.iter().enumerate() {
        prefix_cost += instance.costs[j];
        let h = pos + 1;
        if h <= k {
            continue;
        }
        let value = prefix_cost / (h - k) as f64;
        if best.is_none_or(|(_, v)| value < v) {
            best = Some((h, value));
        }
    }
    let (h, _) = best.expect("n > k guarantees a candidate");
    let level = 1.0 / (h - k) as f64;
    let mut weights = vec![0.0; n];
    for &j in &order[..h] {
        weights[j] = level;
    }
    let objective = weights
        .iter()
        .zip(&instance.costs)
        .map(|(y, c)| y * c)
        .sum();
    SubproblemSolution {
        weights,
        objective,
        prefix: h,
    }
}
