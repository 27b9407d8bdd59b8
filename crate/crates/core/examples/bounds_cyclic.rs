// Regret constants of the 4-arm cyclic tournament.
//
// Run with `cargo run --example bounds_cyclic`.

use copeland_rmed::copeland::CopelandSummary;
use copeland_rmed::datasets::builtin_dataset;
use copeland_rmed::solvers::{
    ccb_bound, ecw_best, ecw_explicit_bound, ecw_worstcase_bound, lower_bound, SolverConfig,
};

pub fn run_example() -> copeland_rmed::Result<()> {
    let matrix = builtin_dataset("cyclic")?;
    let summary = CopelandSummary::new(&matrix)?;
    println!("losses per arm: {:?}", summary.losses);
    println!("Copeland winners (0-based): {:?}", summary.winners);

    let lb = lower_bound(&matrix, &SolverConfig::default())?;
    let ecw = ecw_best(&matrix)?;
    println!("lower bound lambda    = {:.4}", lb.constant);
    println!("ECW constant lambda~  = {:.4}", ecw.constant);
    println!("explicit ECW bound    = {:.1}", ecw_explicit_bound(&matrix, ecw.winner)?);
    println!("worst-case ECW bound  = {:.1}", ecw_worstcase_bound(&matrix)?);
    println!("CCB bound             = {:.1}", ccb_bound(&matrix)?);

    for (pair, q) in ecw.rates.support() {
        println!("  q[{pair}] = {q:.3}");
    }
    assert!(lb.constant <= ecw.constant);
    Ok(())
}

fn main() -> copeland_rmed::Result<()> {
    run_example()
}
