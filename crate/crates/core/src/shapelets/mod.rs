//! Multivariate shapelet transform.
//!
//! Three shapelet flavours share one contracted random search:
//!
//! * [`ShapeletVariant::Independent`]: single-channel shapelets, matched
//!   against the channel they were cut from.
//! * [`ShapeletVariant::MultiDependent`]: `d`-channel shapelets matched at a
//!   single offset shared by all channels.
//! * [`ShapeletVariant::MultiIndependent`]: `d`-channel shapelets whose
//!   channels each find their own best offset.
//!
//! Candidates are drawn uniformly from the space of all (instance, [dim,]
//! length, position) coordinates, scored by binary information gain against
//! the class of the series they came from, and the `k` best (class balanced)
//! define the columns of the transform.

mod distance;
mod quality;
mod search;
mod transform;

pub use distance::shapelet_distance;
pub use quality::{binary_labels, information_gain};
pub use search::{assess_candidate, count_candidates, sample_candidate, search, search_with_stats, SearchStats};
pub use transform::{transform, FeatureMatrix, ShapeletSet};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Candidate count used when neither a count nor a time budget is given.
pub const DEFAULT_TOTAL_SHAPELETS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShapeletVariant {
    #[serde(rename = "independent")]
    Independent,
    #[serde(rename = "shapelet-d")]
    MultiDependent,
    #[serde(rename = "shapelet-i")]
    MultiIndependent,
}

impl ShapeletVariant {
    pub const ALL: [ShapeletVariant; 3] = [
        ShapeletVariant::Independent,
        ShapeletVariant::MultiDependent,
        ShapeletVariant::MultiIndependent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ShapeletVariant::Independent => "independent",
            ShapeletVariant::MultiDependent => "shapelet-d",
            ShapeletVariant::MultiIndependent => "shapelet-i",
        }
    }

    pub fn is_multichannel(self) -> bool {
        !matches!(self, ShapeletVariant::Independent)
    }
}

impl fmt::Display for ShapeletVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeletVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ShapeletVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown shapelet method {s:?}")))
    }
}

/// An extracted (and possibly assessed) shapelet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShapeletCandidate {
    pub variant: ShapeletVariant,
    /// One channel for independent shapelets, `d` otherwise.
    pub channels: Vec<Vec<f64>>,
    pub origin_instance: usize,
    pub origin_position: usize,
    /// Source channel; only set for independent shapelets.
    pub origin_dim: Option<usize>,
    pub length: usize,
    /// Information gain once assessed.
    pub quality: f64,
    pub target_class: String,
    /// Whether channels and windows are z-normalised before comparison.
    pub normalized: bool,
}

/// Parameters of one shapelet search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchConfig {
    pub variant: ShapeletVariant,
    pub min_length: usize,
    pub max_length: usize,
    pub k: usize,
    pub seed: u64,
    /// Wall-clock budget in seconds.
    pub time_budget: Option<f64>,
    /// Number of distinct candidates to assess.
    pub total_shapelets: Option<u64>,
    pub normalize: bool,
}

impl SearchConfig {
    /// Defaults for `dataset`: lengths `3..=m`, `k = min(10c, space size)`,
    /// seed 0 and [`DEFAULT_TOTAL_SHAPELETS`] candidates.
    pub fn defaults_for(dataset: &Dataset, variant: ShapeletVariant) -> Self {
        let m = dataset.series_length();
        let mut config = SearchConfig {
            variant,
            min_length: 3.min(m),
            max_length: m,
            k: 1,
            seed: 0,
            time_budget: None,
            total_shapelets: Some(DEFAULT_TOTAL_SHAPELETS),
            normalize: true,
        };
        config.k = default_k(dataset, &config);
        config
    }

    pub fn validate(&self, dataset: &Dataset) -> Result<()> {
        let m = dataset.series_length();
        if self.min_length < 1 || self.min_length > self.max_length || self.max_length > m {
            return Err(Error::Config(format!(
                "shapelet lengths must satisfy 1 <= min ({}) <= max ({}) <= series length ({m})",
                self.min_length, self.max_length
            )));
        }
        if self.k < 1 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        match (self.time_budget, self.total_shapelets) {
            (None, None) => {
                return Err(Error::Config(
                    "either a time budget or a total candidate count is required".into(),
                ))
            }
            (Some(t), _) if !(t.is_finite() && t > 0.0) => {
                return Err(Error::Config(format!(
                    "time budget {t} must be a positive number of seconds"
                )))
            }
            (_, Some(0)) => return Err(Error::Config("total candidate count must be at least 1".into())),
            _ => {}
        }
        Ok(())
    }
}

/// `min(10c, space size)` for the lengths already set in `config`.
pub fn default_k(dataset: &Dataset, config: &SearchConfig) -> usize {
    let space = count_candidates(dataset, config);
    (10 * dataset.n_classes() as u64).min(space).max(1) as usize
}
