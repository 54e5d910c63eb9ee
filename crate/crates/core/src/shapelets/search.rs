use std::cmp::Ordering;
use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use super::{binary_labels, information_gain, shapelet_distance, SearchConfig, ShapeletCandidate, ShapeletVariant};
use crate::data::{subsequence, z_normalize, Dataset};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from_seed};

/// Candidates assessed between budget checks when only a count governs.
const BATCH: usize = 64;

/// Position of a candidate in the search space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Coord {
    instance: usize,
    dim: Option<usize>,
    length: usize,
    position: usize,
}

fn windows_per_series(m: usize, min: usize, max: usize) -> u64 {
    (min..=max).map(|l| (m - l + 1) as u64).sum()
}

/// Size of the search space: every (instance, [dim,] length, position).
pub fn count_candidates(dataset: &Dataset, config: &SearchConfig) -> u64 {
    let m = dataset.series_length();
    if config.min_length < 1 || config.min_length > config.max_length || config.max_length > m {
        return 0;
    }
    let per_series = windows_per_series(m, config.min_length, config.max_length);
    let per_instance = match config.variant {
        ShapeletVariant::Independent => per_series * dataset.n_dims() as u64,
        _ => per_series,
    };
    per_instance * dataset.n_instances() as u64
}

fn decode(index: u64, dataset: &Dataset, config: &SearchConfig) -> Coord {
    let m = dataset.series_length();
    let per_series = windows_per_series(m, config.min_length, config.max_length);
    let (instance, dim, mut rest) = match config.variant {
        ShapeletVariant::Independent => {
            let per_instance = per_series * dataset.n_dims() as u64;
            let r = index % per_instance;
            (
                (index / per_instance) as usize,
                Some((r / per_series) as usize),
                r % per_series,
            )
        }
        _ => ((index / per_series) as usize, None, index % per_series),
    };
    for length in config.min_length..=config.max_length {
        let span = (m - length + 1) as u64;
        if rest < span {
            return Coord {
                instance,
                dim,
                length,
                position: rest as usize,
            };
        }
        rest -= span;
    }
    unreachable!("index {index} outside the candidate space")
}

fn extract(coord: Coord, dataset: &Dataset, config: &SearchConfig) -> Result<ShapeletCandidate> {
    let inst = dataset.instance(coord.instance);
    let dims: Vec<usize> = match coord.dim {
        Some(j) => vec![j],
        None => (0..inst.n_dims()).collect(),
    };
    let channels = dims
        .into_iter()
        .map(|j| {
            let raw = subsequence(inst, j, coord.position, coord.length)?;
            Ok(if config.normalize {
                z_normalize(&raw)
            } else {
                raw.into_values()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShapeletCandidate {
        variant: config.variant,
        channels,
        origin_instance: coord.instance,
        origin_position: coord.position,
        origin_dim: coord.dim,
        length: coord.length,
        quality: 0.0,
        target_class: inst.label().to_string(),
        normalized: config.normalize,
    })
}

/// Draws one candidate uniformly from the search space and extracts it.
pub fn sample_candidate<R: Rng + ?Sized>(
    rng: &mut R,
    dataset: &Dataset,
    config: &SearchConfig,
) -> Result<ShapeletCandidate> {
    config.validate(dataset)?;
    let count = count_candidates(dataset, config);
    let index = rng.random_range(0..count);
    extract(decode(index, dataset, config), dataset, config)
}

/// Scores `s` by binary information gain over `dataset` and stores it.
pub fn assess_candidate(s: &mut ShapeletCandidate, dataset: &Dataset) -> Result<f64> {
    let distances = dataset
        .instances()
        .iter()
        .map(|inst| shapelet_distance(s, inst))
        .collect::<Result<Vec<f64>>>()?;
    let labels = binary_labels(&dataset.labels(), &s.target_class);
    s.quality = information_gain(&distances, &labels)?;
    Ok(s.quality)
}

/// Distinct uniform draws from `0..count` (lazy Fisher-Yates).
struct DistinctSampler {
    count: u64,
    drawn: u64,
    swapped: HashMap<u64, u64>,
}

impl DistinctSampler {
    fn new(count: u64) -> Self {
        DistinctSampler {
            count,
            drawn: 0,
            swapped: HashMap::new(),
        }
    }

    fn next<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<u64> {
        if self.drawn == self.count {
            return None;
        }
        let i = self.drawn;
        let j = rng.random_range(i..self.count);
        let at_j = *self.swapped.get(&j).unwrap_or(&j);
        let at_i = *self.swapped.get(&i).unwrap_or(&i);
        self.swapped.insert(j, at_i);
        self.swapped.remove(&i);
        self.drawn += 1;
        Some(at_j)
    }
}

#[derive(Debug, Clone, Copy)]
struct Scored {
    coord: Coord,
    quality: f64,
    class: usize,
}

/// Higher quality first, then shorter, then lower origin coordinates.
fn rank_order(a: &Scored, b: &Scored) -> Ordering {
    b.quality
        .total_cmp(&a.quality)
        .then(a.coord.length.cmp(&b.coord.length))
        .then(a.coord.instance.cmp(&b.coord.instance))
        .then(a.coord.position.cmp(&b.coord.position))
        .then(a.coord.dim.unwrap_or(0).cmp(&b.coord.dim.unwrap_or(0)))
}

/// Keeps the `k` best, at most `ceil(k / c)` per class, backfilling from
/// the global order when some class runs short.
fn select_balanced(mut pool: Vec<Scored>, k: usize, n_classes: usize) -> Vec<Scored> {
    pool.sort_by(rank_order);
    let cap = k.div_ceil(n_classes.max(1));
    let mut per_class = vec![0usize; n_classes];
    let mut taken = vec![false; pool.len()];
    let mut kept = 0;
    for (i, s) in pool.iter().enumerate() {
        if kept == k {
            break;
        }
        if per_class[s.class] < cap {
            per_class[s.class] += 1;
            taken[i] = true;
            kept += 1;
        }
    }
    for t in taken.iter_mut() {
        if kept == k {
            break;
        }
        if !*t {
            *t = true;
            kept += 1;
        }
    }
    pool.into_iter()
        .zip(taken)
        .filter_map(|(s, t)| t.then_some(s))
        .collect()
}

/// Bookkeeping from one search run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchStats {
    pub space: u64,
    pub evaluated: u64,
    pub exhaustive: bool,
    pub elapsed: Duration,
}

/// Contracted random shapelet search returning up to `k` shapelets ordered
/// best first.
pub fn search(dataset: &Dataset, config: &SearchConfig) -> Result<Vec<ShapeletCandidate>> {
    search_with_stats(dataset, config).map(|(s, _)| s)
}

/// [`search`], also reporting how much of the space was assessed.
///
/// Candidates are assessed until `total_shapelets` distinct ones are done or
/// the time budget runs out, whichever comes first. When the count covers the
/// whole space every candidate is assessed and the seed is irrelevant. The
/// budget is checked between batches, so only count-governed runs are
/// reproducible.
pub fn search_with_stats(dataset: &Dataset, config: &SearchConfig) -> Result<(Vec<ShapeletCandidate>, SearchStats)> {
    config.validate(dataset)?;
    let started = Instant::now();
    let deadline = config.time_budget.map(|s| started + Duration::from_secs_f64(s));
    let space = count_candidates(dataset, config);
    let target = config.total_shapelets.map_or(space, |t| t.min(space));
    let exhaustive = target == space;

    let mut rng = rng_from_seed(derive_seed(config.seed, "shapelet-search", &[]));
    let mut sampler = DistinctSampler::new(space);
    let mut next_sequential = 0u64;
    let batch_size = if config.time_budget.is_some() {
        rayon::current_num_threads().clamp(1, BATCH)
    } else {
        BATCH
    };

    let class_index = |label: &str| dataset.classes().iter().position(|c| c == label).unwrap_or(0);
    let mut pool: Vec<Scored> = Vec::new();
    let mut evaluated = 0u64;
    while evaluated < target {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let want = (target - evaluated).min(batch_size as u64);
        let mut batch = Vec::with_capacity(want as usize);
        for _ in 0..want {
            let index = if exhaustive && config.time_budget.is_none() {
                next_sequential += 1;
                next_sequential - 1
            } else {
                sampler.next(&mut rng).expect("target never exceeds the space")
            };
            batch.push(decode(index, dataset, config));
        }
        let scored = batch
            .par_iter()
            .map(|&coord| {
                let mut cand = extract(coord, dataset, config)?;
                let quality = assess_candidate(&mut cand, dataset)?;
                Ok(Scored {
                    coord,
                    quality,
                    class: class_index(&cand.target_class),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        evaluated += scored.len() as u64;
        pool.extend(scored);
    }

    if pool.is_empty() {
        return Err(Error::Contract(
            "the budget expired before any candidate was assessed".into(),
        ));
    }
    let kept = select_balanced(pool, config.k, dataset.n_classes());
    let shapelets = kept
        .into_iter()
        .map(|s| {
            let mut cand = extract(s.coord, dataset, config)?;
            cand.quality = s.quality;
            Ok(cand)
        })
        .collect::<Result<Vec<_>>>()?;
    let stats = SearchStats {
        space,
        evaluated,
        exhaustive: evaluated == space,
        elapsed: started.elapsed(),
    };
    Ok((shapelets, stats))
}
