// Built-in datasets and gap-filtered random submatrices.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use copeland_rmed::copeland::CopelandSummary;
use copeland_rmed::datasets::{builtin_dataset, sample_submatrix, Dataset};
use copeland_rmed::matrix::TieMode;
use copeland_rmed::solvers::{ecw_constant, lower_bound, SolverConfig};

pub fn run_example() -> copeland_rmed::Result<()> {
    for d in Dataset::ALL {
        let m = d.load(TieMode::Tolerant)?;
        let s = CopelandSummary::tie_tolerant(&m);
        println!("{:>20}: K = {:2}, losses {:?}", d.name(), m.k(), s.losses);
    }

    let sushi = builtin_dataset("sushi")?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let sub = sample_submatrix(&sushi, 6, 0.02, &mut rng)?;
        let arms: Vec<usize> = sub.arms.iter().map(|a| a + 1).collect();
        let lb = lower_bound(&sub.matrix, &SolverConfig::default())?;
        println!(
            "arms {arms:?}: lambda = {:.1}, lambda~ = {:.1}",
            lb.constant,
            ecw_constant(&sub.matrix)?
        );
    }
    Ok(())
}

fn main() -> copeland_rmed::Result<()> {
    run_example()
}
