// The exact lower-bound LP next to the closed-form relaxation.
//
// With several Copeland winners the two programs have the same value;
// with a Condorcet winner the relaxation can be much larger.

use copeland_rmed::constraints::{check_feasible, cw_constraints};
use copeland_rmed::copeland::CopelandSummary;
use copeland_rmed::datasets::builtin_dataset;
use copeland_rmed::solvers::{ecw_optimal, lp_cw_optimal, SolverConfig};

pub fn run_example() -> copeland_rmed::Result<()> {
    let config = SolverConfig::default();
    for name in ["multisol", "gap", "mslr5_noncondorcet"] {
        let matrix = builtin_dataset(name)?;
        let summary = CopelandSummary::new(&matrix)?;
        println!("{name}: winners {:?}", summary.winners);
        for &w in &summary.winners {
            let lp = lp_cw_optimal(&matrix, w, &config)?;
            let relaxed = ecw_optimal(&matrix, w)?;
            let family = cw_constraints(&matrix, w)?;
            println!(
                "  winner {}: lambda = {:.3}, lambda~ = {:.3}, {} constraints, LP rates feasible: {}",
                w + 1,
                lp.constant,
                relaxed.constant,
                family.descriptors().count(),
                check_feasible(&family, &lp.rates)
            );
        }
    }
    Ok(())
}

fn main() -> copeland_rmed::Result<()> {
    run_example()
}
