// The per-rival covering problem solved by prefix search and by the simplex.

use itertools::Itertools;

use copeland_rmed::solvers::{simplex_solve, solve_subproblem, Covering, SubproblemInstance};

pub fn run_example() -> copeland_rmed::Result<()> {
    let instance = SubproblemInstance {
        costs: vec![4.0, 1.0, 3.0, 2.0],
        slack: 2,
    };
    let fast = solve_subproblem(&instance);
    println!("prefix search: y = {:?}, value {}", fast.weights, fast.objective);

    // every subset of size n - k must carry total weight >= 1
    let n = instance.costs.len();
    let rows: Vec<Covering> = (0..n)
        .combinations(n - instance.slack)
        .map(|s| Covering {
            terms: s.into_iter().map(|j| (j, 1.0)).collect(),
        })
        .collect();
    let upper = vec![f64::INFINITY; n];
    let lp = simplex_solve(&instance.costs, &rows, &upper)?;
    println!("simplex:       y = {:?}, value {}", lp.x, lp.value);
    assert!((lp.value - fast.objective).abs() < 1e-9);
    Ok(())
}

fn main() -> copeland_rmed::Result<()> {
    run_example()
}
