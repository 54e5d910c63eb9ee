//! Resampled benchmark runs, accuracy aggregation, average ranks and
//! pairwise Wilcoxon comparisons.

mod wilcoxon;

pub use wilcoxon::{wilcoxon_signed_rank, wilcoxon_signed_rank_test, WilcoxonResult, EXACT_LIMIT};

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{fit_predict, Algorithm, PipelineParams, Prediction};
use crate::data::{stratified_resample, Dataset, ResampleSpec};
use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// Fraction of predictions equal to the truth.
pub fn accuracy<P: AsRef<str>, T: AsRef<str>>(predictions: &[P], truths: &[T]) -> Result<f64> {
    if predictions.len() != truths.len() {
        return Err(Error::Statistics(format!(
            "{} predictions for {} truths",
            predictions.len(),
            truths.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::Statistics("accuracy of zero predictions".into()));
    }
    let correct = predictions
        .iter()
        .zip(truths)
        .filter(|(p, t)| p.as_ref() == t.as_ref())
        .count();
    Ok(correct as f64 / predictions.len() as f64)
}

/// One (dataset, algorithm, fold) outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub dataset: String,
    pub algorithm: String,
    pub fold: u64,
    pub accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Accuracy of every algorithm on every resample of every dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub datasets: Vec<String>,
    pub algorithms: Vec<String>,
    pub folds: u64,
    pub cells: Vec<Cell>,
}

/// Fold-level statistics of one (dataset, algorithm) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSummary {
    pub mean: f64,
    pub std: f64,
    pub completed: usize,
}

impl ResultsTable {
    pub fn accuracies(&self, dataset: &str, algorithm: &str) -> Vec<f64> {
        self.cells
            .iter()
            .filter(|c| c.dataset == dataset && c.algorithm == algorithm)
            .filter_map(|c| c.accuracy)
            .collect()
    }

    /// Mean and population standard deviation over completed folds.
    pub fn summary(&self, dataset: &str, algorithm: &str) -> Option<CellSummary> {
        let acc = self.accuracies(dataset, algorithm);
        if acc.is_empty() {
            return None;
        }
        let n = acc.len() as f64;
        let mean = acc.iter().sum::<f64>() / n;
        let std = (acc.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n).sqrt();
        Some(CellSummary {
            mean,
            std,
            completed: acc.len(),
        })
    }

    /// Fold-mean accuracy, indexed `[dataset][algorithm]`.
    pub fn mean_matrix(&self) -> Vec<Vec<Option<f64>>> {
        self.datasets
            .iter()
            .map(|d| {
                self.algorithms
                    .iter()
                    .map(|a| self.summary(d, a).map(|s| s.mean))
                    .collect()
            })
            .collect()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.error.is_some())
    }

    /// Checks rectangularity: every (dataset, algorithm, fold) exactly once.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for c in &self.cells {
            if !self.datasets.contains(&c.dataset) || !self.algorithms.contains(&c.algorithm) || c.fold >= self.folds {
                return Err(Error::Statistics(format!(
                    "cell ({}, {}, {}) lies outside the table",
                    c.dataset, c.algorithm, c.fold
                )));
            }
            if !seen.insert((&c.dataset, &c.algorithm, c.fold)) {
                return Err(Error::Statistics(format!(
                    "cell ({}, {}, {}) appears twice",
                    c.dataset, c.algorithm, c.fold
                )));
            }
        }
        let expected = self.datasets.len() * self.algorithms.len() * self.folds as usize;
        if seen.len() != expected {
            return Err(Error::Statistics(format!(
                "table has {} of {expected} cells",
                seen.len()
            )));
        }
        Ok(())
    }
}

/// A dataset's original train/test split.
#[derive(Debug, Clone)]
pub struct Problem {
    pub train: Dataset,
    pub test: Dataset,
}

impl Problem {
    pub fn name(&self) -> &str {
        self.train.name()
    }
}

/// The `fold`-th resample of `problem` as used by [`run_experiment`] with
/// experiment seed `seed`.
pub fn experiment_resample(problem: &Problem, fold: u64, seed: u64) -> Result<(Dataset, Dataset)> {
    let resample_seed = derive_seed(seed, "resample", &[problem.name().into()]);
    stratified_resample(&problem.train, &problem.test, &ResampleSpec::new(fold, resample_seed))
}

fn run_cell(problem: &Problem, algorithm: Algorithm, fold: u64, seed: u64, params: &PipelineParams) -> Result<f64> {
    let name = problem.name();
    let (train, test) = experiment_resample(problem, fold, seed)?;
    let params = PipelineParams {
        seed: derive_seed(seed, "algorithm", &[name.into(), algorithm.name().into(), fold.into()]),
        ..params.clone()
    };
    let predictions = fit_predict(algorithm, &train, &test, &params)?;
    let predicted: Vec<&str> = predictions.iter().map(|p: &Prediction| p.label.as_str()).collect();
    accuracy(&predicted, &test.labels())
}

/// Runs every algorithm on `folds` resamples of every problem.
///
/// All randomness is a pure function of `seed` and the cell's coordinates;
/// resamples depend only on (seed, dataset, fold) so algorithms are compared
/// on identical splits. A failing cell is recorded with its error.
pub fn run_experiment(
    problems: &[Problem],
    algorithms: &[Algorithm],
    folds: u64,
    seed: u64,
    params: &PipelineParams,
) -> Result<ResultsTable> {
    if folds < 1 {
        return Err(Error::Config("at least one fold is required".into()));
    }
    if problems.is_empty() || algorithms.is_empty() {
        return Err(Error::Config("need at least one dataset and one algorithm".into()));
    }
    let names: Vec<String> = problems.iter().map(|p| p.name().to_string()).collect();
    if names.iter().collect::<BTreeSet<_>>().len() != names.len() {
        return Err(Error::Config("dataset names must be unique".into()));
    }
    let algos: Vec<String> = algorithms.iter().map(|a| a.name().to_string()).collect();
    if algos.iter().collect::<BTreeSet<_>>().len() != algos.len() {
        return Err(Error::Config("algorithms must be unique".into()));
    }

    let jobs: Vec<(usize, Algorithm, u64)> = (0..problems.len())
        .flat_map(|p| algorithms.iter().flat_map(move |&a| (0..folds).map(move |f| (p, a, f))))
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(p, algorithm, fold)| {
            let outcome = run_cell(&problems[p], algorithm, fold, seed, params);
            Cell {
                dataset: names[p].clone(),
                algorithm: algorithm.name().to_string(),
                fold,
                accuracy: outcome.as_ref().ok().copied(),
                error: outcome.err().map(|e| e.to_string()),
            }
        })
        .collect();
    Ok(ResultsTable {
        datasets: names,
        algorithms: algos,
        folds,
        cells,
    })
}

/// Per-dataset ranks (1 = best, ties averaged) and their mean per algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RankSummary {
    pub algorithms: Vec<String>,
    pub datasets: Vec<String>,
    /// `[dataset][algorithm]`.
    pub per_dataset_ranks: Vec<Vec<f64>>,
    pub average_ranks: Vec<f64>,
    /// Number of datasets, as used by critical-difference computations.
    pub n_datasets: usize,
    pub n_algorithms: usize,
}

/// Average ranks for a row of scores where higher is better; missing scores
/// rank below everything.
fn rank_row(scores: &[Option<f64>]) -> Vec<f64> {
    let key = |i: usize| scores[i].unwrap_or(f64::NEG_INFINITY);
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| key(b).total_cmp(&key(a)));
    let mut ranks = vec![0.0; scores.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && key(order[end + 1]) == key(order[start]) {
            end += 1;
        }
        let shared = (start + end + 2) as f64 / 2.0;
        for &i in &order[start..=end] {
            ranks[i] = shared;
        }
        start = end + 1;
    }
    ranks
}

/// Ranks algorithms on each dataset by fold-mean accuracy and averages the
/// ranks over datasets.
pub fn average_ranks(table: &ResultsTable) -> Result<RankSummary> {
    if table.algorithms.len() < 2 || table.datasets.is_empty() {
        return Err(Error::Statistics(
            "ranking needs at least two algorithms and one dataset".into(),
        ));
    }
    Ok(rank_means(&table.datasets, &table.algorithms, &table.mean_matrix()))
}

/// [`average_ranks`] over an explicit `[dataset][algorithm]` mean matrix.
pub fn rank_means(datasets: &[String], algorithms: &[String], means: &[Vec<Option<f64>>]) -> RankSummary {
    let per_dataset_ranks: Vec<Vec<f64>> = means.iter().map(|row| rank_row(row)).collect();
    let average_ranks = (0..algorithms.len())
        .map(|a| per_dataset_ranks.iter().map(|r| r[a]).sum::<f64>() / per_dataset_ranks.len() as f64)
        .collect();
    RankSummary {
        algorithms: algorithms.to_vec(),
        datasets: datasets.to_vec(),
        per_dataset_ranks,
        average_ranks,
        n_datasets: datasets.len(),
        n_algorithms: algorithms.len(),
    }
}

/// One pairwise comparison over datasets both algorithms completed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PairwiseTest {
    pub first: String,
    pub second: String,
    pub datasets: usize,
    pub p_value: f64,
}

/// Wilcoxon signed-rank test on fold-mean accuracies for every pair of
/// columns. No multiplicity correction is applied.
pub fn pairwise_wilcoxon(algorithms: &[String], means: &[Vec<Option<f64>>]) -> Result<Vec<PairwiseTest>> {
    let mut out = Vec::new();
    for i in 0..algorithms.len() {
        for j in i + 1..algorithms.len() {
            let (a, b): (Vec<f64>, Vec<f64>) = means.iter().filter_map(|row| Some((row[i]?, row[j]?))).unzip();
            if a.is_empty() {
                continue;
            }
            out.push(PairwiseTest {
                first: algorithms[i].clone(),
                second: algorithms[j].clone(),
                datasets: a.len(),
                p_value: wilcoxon_signed_rank(&a, &b)?,
            });
        }
    }
    Ok(out)
}
