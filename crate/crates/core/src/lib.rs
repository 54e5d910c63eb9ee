//! Multivariate shapelet transform toolkit.
//!
//! * [`data`]: series, instances, datasets, z-normalisation, resampling and
//!   the dataset text format.
//! * [`distances`]: Euclidean, sliding subsequence distance, DTW and its
//!   multivariate forms.
//! * [`shapelets`]: contracted random shapelet search and the transform.
//! * [`classifiers`]: 1-NN pipelines and the concatenation / ensemble wrappers.
//! * [`evaluation`]: resampled experiments, ranks and Wilcoxon tests.

pub mod classifiers;
pub mod data;
pub mod distances;
pub mod error;
pub mod evaluation;
pub mod seed;
pub mod shapelets;
pub mod synthetic;

pub use classifiers::{Algorithm, PipelineParams, Prediction};
pub use data::{Dataset, MultivariateInstance, ResampleSpec, TimeSeries};
pub use distances::{DtwVariant, WarpingWindow};
pub use error::{Error, Result};
pub use evaluation::{Problem, RankSummary, ResultsTable};
pub use shapelets::{FeatureMatrix, SearchConfig, ShapeletCandidate, ShapeletSet, ShapeletVariant};
