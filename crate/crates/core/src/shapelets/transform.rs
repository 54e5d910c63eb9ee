use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{shapelet_distance, SearchConfig, ShapeletCandidate};
use crate::data::Dataset;
use crate::error::{Error, Result};

/// Instance-by-shapelet distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    /// One row per instance, one column per shapelet.
    pub rows: Vec<Vec<f64>>,
    pub shapelets: Vec<ShapeletCandidate>,
    pub labels: Vec<String>,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.shapelets.len()
    }

    /// CSV with header `label,s0,...,s{k-1}`; each comment becomes a leading
    /// `# ` line.
    pub fn write_csv<W: Write>(&self, out: &mut W, comments: &[String]) -> Result<()> {
        for c in comments {
            for line in c.lines() {
                writeln!(out, "# {line}")?;
            }
        }
        let mut header = String::from("label");
        for j in 0..self.n_cols() {
            header.push_str(&format!(",s{j}"));
        }
        writeln!(out, "{header}")?;
        for (label, row) in self.labels.iter().zip(&self.rows) {
            let mut line = label.clone();
            for v in row {
                line.push(',');
                line.push_str(&v.to_string());
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Distances from every instance to every shapelet.
pub fn transform(dataset: &Dataset, shapelets: &[ShapeletCandidate]) -> Result<FeatureMatrix> {
    if shapelets.is_empty() {
        return Err(Error::Config("cannot transform with an empty shapelet set".into()));
    }
    let rows = dataset
        .instances()
        .par_iter()
        .map(|inst| {
            shapelets
                .iter()
                .map(|s| shapelet_distance(s, inst))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FeatureMatrix {
        rows,
        shapelets: shapelets.to_vec(),
        labels: dataset.labels().into_iter().map(String::from).collect(),
    })
}

/// Serialisable search result: enough to transform new data identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShapeletSet {
    pub config: SearchConfig,
    pub shapelets: Vec<ShapeletCandidate>,
}

impl ShapeletSet {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
