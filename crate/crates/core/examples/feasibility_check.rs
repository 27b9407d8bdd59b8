// Checking whether exploration counts already certify a winner.

use copeland_rmed::constraints::{check_feasible, cw_constraints, ecw_constraints, RateVector};
use copeland_rmed::datasets::builtin_dataset;
use copeland_rmed::kl::kl_from_half;
use copeland_rmed::matrix::distinct_pairs;
use copeland_rmed::solvers::ecw_optimal;

pub fn run_example() -> copeland_rmed::Result<()> {
    let matrix = builtin_dataset("cyclic")?;
    let cw = cw_constraints(&matrix, 0)?;
    let ecw = ecw_constraints(&matrix, 0)?;

    let zeros = RateVector::zeros(matrix.k());
    let mut trivial = RateVector::zeros(matrix.k());
    for p in distinct_pairs(matrix.k()) {
        trivial.set(p.hi, p.lo, 1.0 / kl_from_half(matrix.get(p.hi, p.lo)));
    }
    let relaxed = ecw_optimal(&matrix, 0)?.rates;

    for (label, rates) in [("zeros", &zeros), ("trivial", &trivial), ("ECW optimum", &relaxed)] {
        println!(
            "{label:>12}: CW feasible {}, ECW feasible {}, min CW slack {:?}",
            check_feasible(&cw, rates),
            check_feasible(&ecw, rates),
            cw.min_slack(rates)
        );
    }
    println!("rates as JSON: {}", serde_json::to_string(&relaxed)?);
    Ok(())
}

fn main() -> copeland_rmed::Result<()> {
    run_example()
}
