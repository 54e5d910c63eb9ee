//! Runs every classifier over resamples of a planted-pattern problem.
//!
//! Run with: cargo run --release -p mst-core --example planted -- [aligned|independent] [folds] [total]

use std::time::Instant;

use mst_core::classifiers::PipelineParams;
use mst_core::evaluation::run_experiment;
use mst_core::synthetic::{planted_problem, PlantedConfig};
use mst_core::Algorithm;

fn main() -> mst_core::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let aligned = args.get(1).is_none_or(|a| a != "independent");
    let folds: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5);
    let total: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(500);

    let planted = planted_problem(&PlantedConfig {
        aligned,
        ..PlantedConfig::default()
    })?;
    let params = PipelineParams {
        total_shapelets: Some(total),
        ..PipelineParams::default()
    };
    let started = Instant::now();
    let table = run_experiment(&[planted.problem], &Algorithm::ALL, folds, 0, &params)?;
    for algo in &table.algorithms {
        let s = table.summary(&table.datasets[0], algo).expect("completed");
        println!("{algo:>10}  {:.3} ({:.2})", s.mean, s.std);
    }
    println!("elapsed {:.1?}", started.elapsed());
    Ok(())
}
