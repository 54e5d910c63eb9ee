use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{Dataset, MultivariateInstance};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from_seed};

/// One resampling fold. Fold 0 is the original split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResampleSpec {
    pub fold: u64,
    pub seed: u64,
    /// Only consulted by [`stratified_split`], when there is no original split
    /// whose class counts can be preserved.
    pub train_proportion: f64,
}

impl ResampleSpec {
    pub fn new(fold: u64, seed: u64) -> Self {
        ResampleSpec {
            fold,
            seed,
            train_proportion: 0.5,
        }
    }
}

fn check_compatible(train: &Dataset, test: &Dataset) -> Result<()> {
    if train.n_dims() != test.n_dims() || train.series_length() != test.series_length() {
        return Err(Error::Dimension(format!(
            "train is {}x{} but test is {}x{}",
            train.n_dims(),
            train.series_length(),
            test.n_dims(),
            test.series_length()
        )));
    }
    let mut train_classes: Vec<&String> = train.classes().iter().collect();
    let mut test_classes: Vec<&String> = test.classes().iter().collect();
    train_classes.sort();
    test_classes.sort();
    if train_classes != test_classes {
        return Err(Error::Stratification(
            "train and test use different class alphabets".into(),
        ));
    }
    let train_counts = class_counts(train);
    for inst in test.instances() {
        if !train_counts.contains_key(inst.label()) {
            return Err(Error::Stratification(format!(
                "class {:?} occurs in test but not in train",
                inst.label()
            )));
        }
    }
    Ok(())
}

fn class_counts(ds: &Dataset) -> BTreeMap<&str, usize> {
    let mut counts = BTreeMap::new();
    for inst in ds.instances() {
        *counts.entry(inst.label()).or_insert(0) += 1;
    }
    counts
}

/// Pools train and test and redraws a split with the original per-class
/// train counts. Fold 0 returns the inputs unchanged.
pub fn stratified_resample(train: &Dataset, test: &Dataset, spec: &ResampleSpec) -> Result<(Dataset, Dataset)> {
    check_compatible(train, test)?;
    if spec.fold == 0 {
        return Ok((train.clone(), test.clone()));
    }
    let pool: Vec<&MultivariateInstance> = train.instances().iter().chain(test.instances()).collect();
    let counts = class_counts(train);
    let quota = |class: &str, _available: usize| counts.get(class).copied().unwrap_or(0);
    split_pool(&pool, train, spec, quota)
}

/// Stratified split of a single dataset using `spec.train_proportion`.
/// Every class with at least two members keeps one instance on each side.
pub fn stratified_split(dataset: &Dataset, spec: &ResampleSpec) -> Result<(Dataset, Dataset)> {
    let p = spec.train_proportion;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Config(format!("train proportion {p} is not in (0, 1)")));
    }
    let pool: Vec<&MultivariateInstance> = dataset.instances().iter().collect();
    let quota = |_: &str, available: usize| {
        let want = (p * available as f64).round() as usize;
        if available >= 2 {
            want.clamp(1, available - 1)
        } else {
            available
        }
    };
    split_pool(&pool, dataset, spec, quota)
}

fn split_pool(
    pool: &[&MultivariateInstance],
    template: &Dataset,
    spec: &ResampleSpec,
    quota: impl Fn(&str, usize) -> usize,
) -> Result<(Dataset, Dataset)> {
    let mut rng = rng_from_seed(derive_seed(spec.seed, "resample", &[spec.fold.into()]));
    let mut in_train = vec![false; pool.len()];
    for class in template.classes() {
        let mut members: Vec<usize> = (0..pool.len()).filter(|&i| pool[i].label() == class).collect();
        members.shuffle(&mut rng);
        let take = quota(class, members.len()).min(members.len());
        for &i in &members[..take] {
            in_train[i] = true;
        }
    }
    let pick = |side: bool| -> Vec<MultivariateInstance> {
        pool.iter()
            .zip(&in_train)
            .filter(|(_, &t)| t == side)
            .map(|(inst, _)| (*inst).clone())
            .collect()
    };
    let (train_part, test_part) = (pick(true), pick(false));
    if train_part.is_empty() || test_part.is_empty() {
        return Err(Error::Stratification("resampling produced an empty split".into()));
    }
    let classes = template.classes().to_vec();
    Ok((
        Dataset::new(template.name(), train_part, classes.clone())?,
        Dataset::new(template.name(), test_part, classes)?,
    ))
}
