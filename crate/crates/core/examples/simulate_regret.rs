// A small Monte-Carlo comparison of ECW-RMED, CW-RMED and uniform sampling.

use copeland_rmed::bandit::{AlgorithmConfig, Variant};
use copeland_rmed::datasets::builtin_dataset;
use copeland_rmed::harness::{simulate_batch, write_trace, BatchSpec, TraceFormat};
use copeland_rmed::solvers::ecw_constant;

pub fn run_example() -> copeland_rmed::Result<()> {
    let matrix = builtin_dataset("cyclic")?;
    let horizon = 5_000;
    let lambda = ecw_constant(&matrix)?;
    for variant in [Variant::Ecw, Variant::Cw, Variant::Random] {
        let spec = BatchSpec {
            dataset: "cyclic".into(),
            matrix: matrix.clone(),
            config: AlgorithmConfig::new(variant),
            horizon,
            runs: 8,
            master_seed: 42,
            parallelism: 2,
        };
        let trace = simulate_batch(&spec)?;
        println!(
            "{:>6}: R(T) = {:7.1} +- {:5.1}, R(T)/(lambda~ ln T) = {:.2}",
            variant.name(),
            trace.final_mean(),
            trace.final_std(),
            trace.final_mean() / (lambda * (horizon as f64).ln())
        );
        if variant == Variant::Ecw {
            let path = std::env::temp_dir().join(trace.meta.file_name("csv"));
            write_trace(&trace, std::fs::File::create(&path)?, TraceFormat::Csv)?;
            println!("        trace written to {}", path.display());
        }
    }
    Ok(())
}

fn main() -> copeland_rmed::Result<()> {
    run_example()
}
