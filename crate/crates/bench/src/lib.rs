//! Shared fixtures for the kernel benchmarks.

use mst_core::evaluation::Problem;
use mst_core::synthetic::{planted_problem, PlantedConfig};

/// Planted-pattern problem shaped like a small activity-recognition set.
pub fn fixture(n_dims: usize, length: usize, per_class: usize) -> Problem {
    planted_problem(&PlantedConfig {
        name: format!("Bench{n_dims}x{length}"),
        n_dims,
        length,
        train_per_class: per_class,
        test_per_class: per_class,
        pattern_length: (length / 5).max(3),
        ..PlantedConfig::default()
    })
    .expect("valid fixture config")
    .problem
}
