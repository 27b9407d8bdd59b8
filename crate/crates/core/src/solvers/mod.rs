//! Optimal exploration rates, regret constants, and the LP engine behind them.

pub mod bounds;
pub mod exploration;
pub mod simplex;
pub mod subproblem;

pub use bounds::{ccb_bound, ecw_explicit_bound, ecw_worstcase_bound};
pub use exploration::{
    ecw_best, ecw_constant, ecw_optimal, lower_bound, lp_cw_optimal, Exactness,
    OptimalExploration, SolverConfig,
};
pub use simplex::{simplex_solve, Covering, LpSolution};
pub use subproblem::{solve_subproblem, SubproblemInstance, SubproblemSolution};
