//! Planted-pattern datasets: white-noise series with a class-specific
//! waveform injected at a random phase.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, MultivariateInstance};
use crate::error::{Error, Result};
use crate::evaluation::Problem;
use crate::seed::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlantedConfig {
    pub name: String,
    pub n_classes: usize,
    pub n_dims: usize,
    pub length: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub pattern_length: usize,
    pub amplitude: f64,
    pub noise: f64,
    /// Same phase in every dimension; otherwise each dimension draws its own.
    pub aligned: bool,
    /// The first `blank_classes` classes get no pattern at all.
    pub blank_classes: usize,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            name: "Planted".into(),
            n_classes: 4,
            n_dims: 3,
            length: 100,
            train_per_class: 10,
            test_per_class: 10,
            pattern_length: 20,
            amplitude: 2.0,
            noise: 0.5,
            aligned: true,
            blank_classes: 0,
            seed: 0,
        }
    }
}

/// Generated data plus where each pattern was planted.
#[derive(Debug, Clone)]
pub struct PlantedProblem {
    pub problem: Problem,
    /// `[instance][dim]` start of the pattern in train; `None` for blank classes.
    pub train_positions: Vec<Option<Vec<usize>>>,
    pub test_positions: Vec<Option<Vec<usize>>>,
}

/// Waveform of `class` in dimension `dim`: `class + 1` sine cycles, shifted
/// by a quarter cycle per dimension.
pub fn waveform(class: usize, dim: usize, len: usize, amplitude: f64) -> Vec<f64> {
    let cycles = (class + 1) as f64;
    let phase = dim as f64 * std::f64::consts::FRAC_PI_2;
    (0..len)
        .map(|t| amplitude * (std::f64::consts::TAU * cycles * t as f64 / len as f64 + phase).sin())
        .collect()
}

fn class_label(c: usize) -> String {
    format!("c{c}")
}

/// Per-instance pattern starts, `None` for blank classes.
type Positions = Vec<Option<Vec<usize>>>;

fn generate_split<R: Rng>(
    cfg: &PlantedConfig,
    per_class: usize,
    rng: &mut R,
) -> Result<(Vec<MultivariateInstance>, Positions)> {
    let noise = Normal::new(0.0, cfg.noise).map_err(|e| Error::Config(e.to_string()))?;
    let mut instances = Vec::new();
    let mut positions = Vec::new();
    // interleave classes so no split is sorted by label
    for _ in 0..per_class {
        for c in 0..cfg.n_classes {
            let mut dims: Vec<Vec<f64>> = (0..cfg.n_dims)
                .map(|_| (0..cfg.length).map(|_| noise.sample(rng)).collect())
                .collect();
            if c < cfg.blank_classes {
                positions.push(None);
            } else {
                let last = cfg.length - cfg.pattern_length;
                let shared = rng.random_range(0..=last);
                let starts: Vec<usize> = (0..cfg.n_dims)
                    .map(|_| {
                        if cfg.aligned {
                            shared
                        } else {
                            rng.random_range(0..=last)
                        }
                    })
                    .collect();
                for (j, series) in dims.iter_mut().enumerate() {
                    let wave = waveform(c, j, cfg.pattern_length, cfg.amplitude);
                    for (v, w) in series[starts[j]..].iter_mut().zip(wave) {
                        *v += w;
                    }
                }
                positions.push(Some(starts));
            }
            instances.push(MultivariateInstance::from_values(dims, class_label(c))?);
        }
    }
    Ok((instances, positions))
}

pub fn planted_problem(cfg: &PlantedConfig) -> Result<PlantedProblem> {
    if cfg.n_classes < 1 || cfg.n_dims < 1 || cfg.train_per_class < 1 || cfg.test_per_class < 1 {
        return Err(Error::Config(
            "planted data needs at least one class, dimension and instance".into(),
        ));
    }
    if cfg.pattern_length < 1 || cfg.pattern_length > cfg.length {
        return Err(Error::Config("pattern must fit inside the series".into()));
    }
    let mut rng = rng_from_seed(derive_seed(cfg.seed, "planted", &[cfg.name.as_str().into()]));
    let classes: Vec<String> = (0..cfg.n_classes).map(class_label).collect();
    let (train, train_positions) = generate_split(cfg, cfg.train_per_class, &mut rng)?;
    let (test, test_positions) = generate_split(cfg, cfg.test_per_class, &mut rng)?;
    Ok(PlantedProblem {
        problem: Problem {
            train: Dataset::new(cfg.name.clone(), train, classes.clone())?,
            test: Dataset::new(cfg.name.clone(), test, classes)?,
        },
        train_positions,
        test_positions,
    })
}
