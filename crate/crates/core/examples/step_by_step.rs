// Driving the ECW-RMED state machine by hand with a custom feedback source.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use copeland_rmed::bandit::{AlgorithmConfig, RmedState, Variant};
use copeland_rmed::datasets::builtin_dataset;

pub fn run_example() -> copeland_rmed::Result<()> {
    let matrix = builtin_dataset("multisol")?;
    let config = AlgorithmConfig::new(Variant::Ecw);
    let mut state = RmedState::new(matrix.k(), &config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    for _ in 0..3_000 {
        let pair = state.select_pair();
        let first_wins = !pair.is_self() && rng.gen_bool(matrix.get(pair.hi, pair.lo));
        state.update_and_plan(&config, pair, first_wins)?;
    }
    let counts = state.counts();
    println!("after {} rounds:", state.round() - 1);
    println!("  current candidate: {:?}", state.candidate().map(|c| c + 1));
    for i in 0..matrix.k() {
        let row: Vec<u64> = (0..matrix.k()).map(|j| counts.draws(i, j)).collect();
        println!("  draws of arm {}: {:?}", i + 1, row);
    }
    println!("  next loop list: {:?}", state.loop_list().iter().map(|p| p.to_string()).collect::<Vec<_>>());
    Ok(())
}

fn main() -> copeland_rmed::Result<()> {
    run_example()
}
