//! Dense simplex for covering LPs with box constraints:
//!
//! ```text
//!     minimize    c . x
//!     subject to  a_r . x >= 1        for every row r
//!                 0 <= x_j <= u_j     (u_j may be +inf)
//! ```
//!
//! with `c >= 0` and `a_r >= 0`. The origin is infeasible for the primal, so
//! the solver runs primal simplex on the dual
//!
//! ```text
//!     maximize    sum_r y_r - sum_j u_j z_j
//!     subject to  sum_r a_rj y_r - z_j <= c_j,   y, z >= 0
//! ```
//!
//! whose slack basis is feasible because `c >= 0`. The optimal primal vertex
//! is read off the final reduced costs of the dual slacks. Pivoting follows
//! Bland's rule, so the result is deterministic.

use crate::error::{Error, Result};

/// Pivots smaller than this are refused.
pub const MIN_PIVOT: f64 = 1e-11;
const REDUCED_COST_EPS: f64 = 1e-10;
const ZERO_EPS: f64 = 1e-14;
const MAX_PIVOTS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

/// A covering constraint `coefficients . x >= 1`, given sparsely as
/// `(variable, coefficient)` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Covering {
    pub terms: Vec<(usize, f64)>,
}

impl Covering {
    pub fn dense(coefficients: &[f64]) -> Self {
        Covering {
            terms: coefficients
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(j, c)| (j, *c))
                .collect(),
        }
    }
}

/// Solves the covering LP described in the module docs.
pub fn simplex_solve(
    objective: &[f64],
    constraints: &[Covering],
    upper_bounds: &[f64],
) -> Result<LpSolution> {
    let n = objective.len();
    if upper_bounds.len() != n {
        return Err(Error::InvalidConfig(format!(
            "{} upper bounds for {n} variables",
            upper_bounds.len()
        )));
    }
    if objective.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
        return Err(Error::InvalidConfig("objective must be finite and >= 0".into()));
    }
    if upper_bounds.iter().any(|u| u.is_nan() || *u < 0.0) {
        return Err(Error::InvalidConfig("upper bounds must be >= 0".into()));
    }
    for row in constraints {
        for &(j, a) in &row.terms {
            if j >= n || !(a.is_finite() && a >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "bad constraint term ({j}, {a})"
                )));
            }
        }
    }

    let m = constraints.len();
    let bounded: Vec<usize> = (0..n).filter(|&j| upper_bounds[j].is_finite()).collect();
    // columns: y (m) | z (bounded) | s (n) | rhs
    let cols = m + bounded.len() + n;
    let width = cols + 1;
    let mut tab = vec![0.0; n * width];
    for (r, row) in constraints.iter().enumerate() {
        for &(j, a) in &row.terms {
            tab[j * width + r] += a;
        }
    }
    for (zi, &j) in bounded.iter().enumerate() {
        tab[j * width + m + zi] = -1.0;
    }
    for j in 0..n {
        tab[j * width + m + bounded.len() + j] = 1.0;
        tab[j * width + cols] = objective[j];
    }
    // reduced profits of the maximization; basis starts at the slacks
    let mut profit = vec![0.0; cols];
    profit[..m].fill(1.0);
    for (zi, &j) in bounded.iter().enumerate() {
        profit[m + zi] = -upper_bounds[j];
    }
    let mut basis: Vec<usize> = (0..n).map(|j| m + bounded.len() + j).collect();

    let mut pivots = 0;
    while let Some(enter) = (0..cols).find(|&c| profit[c] > REDUCED_COST_EPS) {
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..n {
            let a = tab[r * width + enter];
            if a <= ZERO_EPS {
                continue;
            }
            let ratio = tab[r * width + cols] / a;
            leave = match leave {
                None => Some((r, ratio)),
                Some((best, best_ratio)) => {
                    if ratio < best_ratio - ZERO_EPS
                        || (ratio <= best_ratio + ZERO_EPS && basis[r] < basis[best])
                    {
                        Some((r, ratio))
                    } else {
                        Some((best, best_ratio))
                    }
                }
            };
        }
        // unbounded dual: no primal point covers every row
        let Some((pr, _)) = leave else {
            return Err(Error::Infeasible);
        };
        let pivot = tab[pr * width + enter];
        if pivot.abs() < MIN_PIVOT {
            return Err(Error::NumericalInstability { pivot });
        }
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::IterationLimit(MAX_PIVOTS));
        }

        let (head, rest) = tab.split_at_mut(pr * width);
        let (prow, tail) = rest.split_at_mut(width);
        for v in prow.iter_mut() {
            *v /= pivot;
        }
        prow[enter] = 1.0;
        for row in head.chunks_mut(width).chain(tail.chunks_mut(width)) {
            let f = row[enter];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                row[enter] = 0.0;
            }
        }
        let f = profit[enter];
        for (v, p) in profit.iter_mut().zip(prow[..cols].iter()) {
            *v -= f * p;
        }
        profit[enter] = 0.0;
        basis[pr] = enter;
    }

    let slack0 = m + bounded.len();
    let x: Vec<f64> = (0..n)
        .map(|j| (-profit[slack0 + j]).clamp(0.0, upper_bounds[j]))
        .collect();
    let value = x.iter().zip(objective).map(|(x, c)| x * c).sum();
    Ok(LpSolution { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable() {
        let sol = simplex_solve(&[2.0], &[Covering::dense(&[1.0])], &[3.0]).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-12);
        assert!((sol.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cheapest_cover_of_pairs() {
        // every 2-subset of 3 elements must sum to 1, costs 1,1,3
        let rows = [[1.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]];
        let cons: Vec<Covering> = rows.iter().map(|r| Covering::dense(r)).collect();
        let inf = f64::INFINITY;
        let sol = simplex_solve(&[1.0, 1.0, 3.0], &cons, &[inf, inf, inf]).unwrap();
        assert!((sol.value - 2.0).abs() < 1e-12);
        for r in &rows {
            let lhs: f64 = r.iter().zip(&sol.x).map(|(a, x)| a * x).sum();
            assert!(lhs >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn box_forces_expensive_variable() {
        // x0 + x1 >= 1 with x0 <= 0.25: x1 must carry 0.75
        let sol =
            simplex_solve(&[1.0, 4.0], &[Covering::dense(&[1.0, 1.0])], &[0.25, 10.0]).unwrap();
        assert!((sol.x[0] - 0.25).abs() < 1e-12);
        assert!((sol.x[1] - 0.75).abs() < 1e-12);
        assert!((sol.value - 3.25).abs() < 1e-12);
    }

    #[test]
    fn infeasible_boxes_are_reported() {
        let res = simplex_solve(&[1.0], &[Covering::dense(&[1.0])], &[0.5]);
        assert!(matches!(res, Err(Error::Infeasible)));
        let res = simplex_solve(&[1.0], &[Covering { terms: vec![] }], &[f64::INFINITY]);
        assert!(matches!(res, Err(Error::Infeasible)));
    }

    #[test]
    fn zero_cost_variables_are_used() {
        let sol = simplex_solve(&[0.0, 5.0], &[Covering::dense(&[1.0, 1.0])], &[2.0, 2.0]).unwrap();
        assert_eq!(sol.value, 0.0);
        assert!((sol.x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_constraints_gives_origin() {
        let sol = simplex_solve(&[1.0, 2.0], &[], &[1.0, 1.0]).unwrap();
        assert_eq!(sol.x, vec![0.0, 0.0]);
        assert_eq!(sol.value, 0.0);
    }

    #[test]
    fn rejects_negative_costs() {
        assert!(simplex_solve(&[-1.0], &[], &[1.0]).is_err());
    }
}
