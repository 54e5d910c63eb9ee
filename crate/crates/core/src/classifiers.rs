//! 1-NN classifiers over raw multivariate distances and over the shapelet
//! transform, plus the concatenation and per-dimension ensemble wrappers.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, MultivariateInstance, TimeSeries};
use crate::distances::{dtw, dtw_a_select, euclidean_dist, multivariate_dtw, DtwVariant, WarpingWindow};
use crate::error::{Error, Result};
use crate::shapelets::{
    default_k, search, transform, FeatureMatrix, SearchConfig, ShapeletSet, ShapeletVariant, DEFAULT_TOTAL_SHAPELETS,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: String,
    /// Per-class tally, for ensembles.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub votes: Option<BTreeMap<String, usize>>,
}

impl Prediction {
    fn single(label: impl Into<String>) -> Self {
        Prediction {
            label: label.into(),
            votes: None,
        }
    }
}

/// Index and distance of the closest training item; ties go to the lowest index.
pub fn nearest_neighbor<T: ?Sized, I, D>(train: &[I], query: &T, distance: D) -> Result<(usize, f64)>
where
    I: std::borrow::Borrow<T>,
    D: Fn(&T, &T) -> Result<f64>,
{
    if train.is_empty() {
        return Err(Error::Config("1-NN needs at least one training item".into()));
    }
    let mut best = (0, f64::INFINITY);
    for (i, item) in train.iter().enumerate() {
        let d = distance(item.borrow(), query)?;
        if d < best.1 {
            best = (i, d);
        }
    }
    Ok(best)
}

/// Label of the nearest training item.
pub fn knn1_predict<T: ?Sized, I, S, D>(train: &[I], labels: &[S], distance: D, query: &T) -> Result<Prediction>
where
    I: std::borrow::Borrow<T>,
    S: AsRef<str>,
    D: Fn(&T, &T) -> Result<f64>,
{
    if train.len() != labels.len() {
        return Err(Error::Dimension(format!(
            "{} training items but {} labels",
            train.len(),
            labels.len()
        )));
    }
    let (i, _) = nearest_neighbor(train, query, distance)?;
    Ok(Prediction::single(labels[i].as_ref()))
}

/// All dimensions appended in order into one series of length `d * m`.
pub fn concatenate(instance: &MultivariateInstance) -> TimeSeries {
    let values: Vec<f64> = instance.dims().iter().flat_map(|s| s.iter().copied()).collect();
    TimeSeries::new(values).expect("concatenation of valid series is valid")
}

/// Majority vote of per-dimension 1-NN classifiers.
///
/// Vote ties go to the label whose best per-dimension neighbour distance is
/// smallest, then to class-alphabet order.
pub fn ensemble_predict<D>(train: &Dataset, distance: D, query: &MultivariateInstance) -> Result<Prediction>
where
    D: Fn(&[f64], &[f64]) -> Result<f64>,
{
    if query.n_dims() != train.n_dims() {
        return Err(Error::Dimension(format!(
            "query has {} dimensions, training data {}",
            query.n_dims(),
            train.n_dims()
        )));
    }
    let mut votes: BTreeMap<String, usize> = BTreeMap::new();
    let mut closest: BTreeMap<String, f64> = BTreeMap::new();
    for j in 0..train.n_dims() {
        let column: Vec<&[f64]> = train.instances().iter().map(|i| i.dim(j).values()).collect();
        let (idx, dist) = nearest_neighbor(&column, query.dim(j).values(), &distance)?;
        let label = train.instance(idx).label().to_string();
        *votes.entry(label.clone()).or_insert(0) += 1;
        let c = closest.entry(label).or_insert(f64::INFINITY);
        *c = c.min(dist);
    }
    let alphabet_rank = |l: &str| train.classes().iter().position(|c| c == l).unwrap_or(usize::MAX);
    let label = votes
        .iter()
        .max_by(|(la, va), (lb, vb)| {
            va.cmp(vb)
                .then(closest[*lb].total_cmp(&closest[*la]))
                .then(alphabet_rank(lb).cmp(&alphabet_rank(la)))
        })
        .map(|(l, _)| l.clone())
        .expect("at least one dimension votes");
    Ok(Prediction {
        label,
        votes: Some(votes),
    })
}

/// Shapelet transform followed by 1-NN (Euclidean) on the feature rows.
#[derive(Debug, Clone)]
pub struct ShapeletTransformClassifier {
    shapelets: ShapeletSet,
    train_features: FeatureMatrix,
}

impl ShapeletTransformClassifier {
    pub fn fit(train: &Dataset, config: &SearchConfig) -> Result<Self> {
        let shapelets = search(train, config)?;
        Self::from_shapelets(
            train,
            ShapeletSet {
                config: config.clone(),
                shapelets,
            },
        )
    }

    /// Reuses an existing shapelet set, e.g. one loaded from JSON.
    pub fn from_shapelets(train: &Dataset, shapelets: ShapeletSet) -> Result<Self> {
        let train_features = transform(train, &shapelets.shapelets)?;
        Ok(ShapeletTransformClassifier {
            shapelets,
            train_features,
        })
    }

    pub fn shapelets(&self) -> &ShapeletSet {
        &self.shapelets
    }

    pub fn train_features(&self) -> &FeatureMatrix {
        &self.train_features
    }

    pub fn predict_features(&self, features: &FeatureMatrix) -> Result<Vec<Prediction>> {
        let train_rows = &self.train_features.rows;
        features
            .rows
            .par_iter()
            .map(|row| {
                knn1_predict(
                    train_rows,
                    &self.train_features.labels,
                    |a: &[f64], b: &[f64]| euclidean_dist(a, b),
                    row.as_slice(),
                )
            })
            .collect()
    }

    pub fn predict(&self, test: &Dataset) -> Result<Vec<Prediction>> {
        let features = transform(test, &self.shapelets.shapelets)?;
        self.predict_features(&features)
    }
}

/// Search on `train`, transform both sets, 1-NN on the features.
pub fn st_pipeline_fit_predict(train: &Dataset, test: &Dataset, config: &SearchConfig) -> Result<Vec<Prediction>> {
    ShapeletTransformClassifier::fit(train, config)?.predict(test)
}

/// The classifiers the benchmark harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "dtw-i")]
    DtwI,
    #[serde(rename = "dtw-d")]
    DtwD,
    #[serde(rename = "dtw-a")]
    DtwA,
    #[serde(rename = "1nn-ed-c")]
    EuclideanConcat,
    #[serde(rename = "1nn-dtw-c")]
    DtwConcat,
    #[serde(rename = "1nn-dtw-e")]
    DtwEnsemble,
    #[serde(rename = "st-indep")]
    StIndependent,
    #[serde(rename = "st-d")]
    StDependent,
    #[serde(rename = "st-i")]
    StMultiIndependent,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Algorithm::DtwI,
        Algorithm::DtwD,
        Algorithm::DtwA,
        Algorithm::EuclideanConcat,
        Algorithm::DtwConcat,
        Algorithm::DtwEnsemble,
        Algorithm::StIndependent,
        Algorithm::StDependent,
        Algorithm::StMultiIndependent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::DtwI => "dtw-i",
            Algorithm::DtwD => "dtw-d",
            Algorithm::DtwA => "dtw-a",
            Algorithm::EuclideanConcat => "1nn-ed-c",
            Algorithm::DtwConcat => "1nn-dtw-c",
            Algorithm::DtwEnsemble => "1nn-dtw-e",
            Algorithm::StIndependent => "st-indep",
            Algorithm::StDependent => "st-d",
            Algorithm::StMultiIndependent => "st-i",
        }
    }

    pub fn shapelet_variant(self) -> Option<ShapeletVariant> {
        match self {
            Algorithm::StIndependent => Some(ShapeletVariant::Independent),
            Algorithm::StDependent => Some(ShapeletVariant::MultiDependent),
            Algorithm::StMultiIndependent => Some(ShapeletVariant::MultiIndependent),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let known: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
            Error::Config(format!("unknown algorithm {s:?}; expected one of {}", known.join(", ")))
        })
    }
}

/// Dataset-independent settings; unset shapelet fields fall back to the
/// per-dataset defaults of [`SearchConfig::defaults_for`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PipelineParams {
    pub window: WarpingWindow,
    pub seed: u64,
    pub min_length: Option<usize>,
    pub max_length: Option<usize>,
    pub k: Option<usize>,
    pub total_shapelets: Option<u64>,
    pub time_budget: Option<f64>,
    pub normalize: bool,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            window: WarpingWindow::FULL,
            seed: 0,
            min_length: None,
            max_length: None,
            k: None,
            total_shapelets: None,
            time_budget: None,
            normalize: true,
        }
    }
}

impl PipelineParams {
    pub fn search_config(&self, dataset: &Dataset, variant: ShapeletVariant) -> Result<SearchConfig> {
        let mut config = SearchConfig::defaults_for(dataset, variant);
        config.seed = self.seed;
        config.normalize = self.normalize;
        if let Some(min) = self.min_length {
            config.min_length = min;
        }
        if let Some(max) = self.max_length {
            config.max_length = max;
        }
        config.time_budget = self.time_budget;
        config.total_shapelets = match (self.total_shapelets, self.time_budget) {
            (None, None) => Some(DEFAULT_TOTAL_SHAPELETS),
            (total, _) => total,
        };
        config.validate(dataset)?;
        config.k = self.k.unwrap_or_else(|| default_k(dataset, &config));
        config.validate(dataset)?;
        Ok(config)
    }
}

fn predict_all<T, F>(items: &[T], f: F) -> Result<Vec<Prediction>>
where
    T: Sync,
    F: Fn(&T) -> Result<Prediction> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Fits `algorithm` on `train` and predicts every instance of `test`.
pub fn fit_predict(
    algorithm: Algorithm,
    train: &Dataset,
    test: &Dataset,
    params: &PipelineParams,
) -> Result<Vec<Prediction>> {
    if train.n_dims() != test.n_dims() || train.series_length() != test.series_length() {
        return Err(Error::Dimension(format!(
            "train is {}x{} but test is {}x{}",
            train.n_dims(),
            train.series_length(),
            test.n_dims(),
            test.series_length()
        )));
    }
    let window = params.window;
    let labels = train.labels();
    let mdtw = |variant: DtwVariant| {
        predict_all(test.instances(), |q| {
            knn1_predict(
                train.instances(),
                &labels,
                |a: &MultivariateInstance, b: &MultivariateInstance| multivariate_dtw(variant, a, b, window),
                q,
            )
        })
    };
    match algorithm {
        Algorithm::DtwI => mdtw(DtwVariant::Independent),
        Algorithm::DtwD => mdtw(DtwVariant::Dependent),
        Algorithm::DtwA => mdtw(dtw_a_select(train, window)?),
        Algorithm::EuclideanConcat | Algorithm::DtwConcat => {
            let flat: Vec<TimeSeries> = train.instances().iter().map(concatenate).collect();
            predict_all(test.instances(), |q| {
                let query = concatenate(q);
                if algorithm == Algorithm::EuclideanConcat {
                    knn1_predict(
                        &flat,
                        &labels,
                        |a: &TimeSeries, b: &TimeSeries| euclidean_dist(a, b),
                        &query,
                    )
                } else {
                    knn1_predict(
                        &flat,
                        &labels,
                        |a: &TimeSeries, b: &TimeSeries| dtw(a, b, window),
                        &query,
                    )
                }
            })
        }
        Algorithm::DtwEnsemble => predict_all(test.instances(), |q| {
            ensemble_predict(train, |a, b| dtw(a, b, window), q)
        }),
        Algorithm::StIndependent | Algorithm::StDependent | Algorithm::StMultiIndependent => {
            let variant = algorithm.shapelet_variant().expect("shapelet algorithm");
            let config = params.search_config(train, variant)?;
            st_pipeline_fit_predict(train, test, &config)
        }
    }
}

/// CSV `instanceIndex,trueLabel,predictedLabel`, after `# ` comment lines.
pub fn write_predictions_csv<W: Write>(
    out: &mut W,
    test: &Dataset,
    predictions: &[Prediction],
    comments: &[String],
) -> Result<()> {
    if predictions.len() != test.n_instances() {
        return Err(Error::Dimension(format!(
            "{} predictions for {} instances",
            predictions.len(),
            test.n_instances()
        )));
    }
    for c in comments {
        for line in c.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    writeln!(out, "instanceIndex,trueLabel,predictedLabel")?;
    for (i, (inst, p)) in test.instances().iter().zip(predictions).enumerate() {
        writeln!(out, "{i},{},{}", inst.label(), p.label)?;
    }
    Ok(())
}
