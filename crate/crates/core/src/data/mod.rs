//! Series, instances and datasets, plus z-normalisation, resampling and the
//! `.ts`-style text format.

mod format;
mod resample;

pub use format::{format_sample, parse_dataset, read_dataset, write_dataset};
pub use resample::{stratified_resample, stratified_split, ResampleSpec};

use std::collections::BTreeSet;
use std::ops::Deref;

use crate::error::{Error, Result};

/// Relative standard deviation under which a window counts as flat.
///
/// Rounding noise on a constant series is a few ulps of its magnitude, far
/// below this bound.
pub const FLAT_RELATIVE_STD: f64 = 1e-12;

/// A univariate, finite, non-empty series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries(Vec<f64>);

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidData("time series must hold at least one value".into()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite value {} at position {pos}",
                values[pos]
            )));
        }
        Ok(TimeSeries(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn z_normalized(&self) -> TimeSeries {
        TimeSeries(z_normalize(&self.0))
    }
}

impl Deref for TimeSeries {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for TimeSeries {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        TimeSeries::new(values)
    }
}

/// `d` aligned series of equal length sharing one class label.
#[derive(Debug, Clone, PartialEq)]
pub struct MultivariateInstance {
    dims: Vec<TimeSeries>,
    label: String,
}

impl MultivariateInstance {
    pub fn new(dims: Vec<TimeSeries>, label: impl Into<String>) -> Result<Self> {
        let Some(first) = dims.first() else {
            return Err(Error::InvalidData("an instance needs at least one dimension".into()));
        };
        let m = first.len();
        if let Some(j) = dims.iter().position(|s| s.len() != m) {
            return Err(Error::Dimension(format!(
                "dimension {j} has length {} but dimension 0 has length {m}",
                dims[j].len()
            )));
        }
        Ok(MultivariateInstance {
            dims,
            label: label.into(),
        })
    }

    /// Convenience constructor from raw per-dimension vectors.
    pub fn from_values(dims: Vec<Vec<f64>>, label: impl Into<String>) -> Result<Self> {
        let dims = dims.into_iter().map(TimeSeries::new).collect::<Result<Vec<_>>>()?;
        MultivariateInstance::new(dims, label)
    }

    pub fn dims(&self) -> &[TimeSeries] {
        &self.dims
    }

    pub fn dim(&self, j: usize) -> &TimeSeries {
        &self.dims[j]
    }

    pub fn n_dims(&self) -> usize {
        self.dims.len()
    }

    pub fn series_length(&self) -> usize {
        self.dims[0].len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// A rectangular collection of labelled instances.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    instances: Vec<MultivariateInstance>,
    classes: Vec<String>,
}

impl Dataset {
    /// Builds a dataset with an explicit, ordered class alphabet.
    pub fn new(name: impl Into<String>, instances: Vec<MultivariateInstance>, classes: Vec<String>) -> Result<Self> {
        let Some(first) = instances.first() else {
            return Err(Error::InvalidData("a dataset needs at least one instance".into()));
        };
        let (d, m) = (first.n_dims(), first.series_length());
        for (i, inst) in instances.iter().enumerate() {
            if inst.n_dims() != d || inst.series_length() != m {
                return Err(Error::Dimension(format!(
                    "instance {i} is {}x{} but instance 0 is {d}x{m}",
                    inst.n_dims(),
                    inst.series_length()
                )));
            }
        }
        let mut seen = BTreeSet::new();
        for c in &classes {
            if !seen.insert(c.as_str()) {
                return Err(Error::InvalidData(format!("duplicate class label {c:?}")));
            }
        }
        for (i, inst) in instances.iter().enumerate() {
            if !seen.contains(inst.label()) {
                return Err(Error::InvalidData(format!(
                    "instance {i} has label {:?} which is not in the class alphabet",
                    inst.label()
                )));
            }
        }
        Ok(Dataset {
            name: name.into(),
            instances,
            classes,
        })
    }

    /// Builds a dataset whose class alphabet is the sorted set of labels present.
    pub fn from_instances(name: impl Into<String>, instances: Vec<MultivariateInstance>) -> Result<Self> {
        let classes: BTreeSet<String> = instances.iter().map(|i| i.label().to_string()).collect();
        Dataset::new(name, instances, classes.into_iter().collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn instances(&self) -> &[MultivariateInstance] {
        &self.instances
    }

    pub fn instance(&self, i: usize) -> &MultivariateInstance {
        &self.instances[i]
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn n_instances(&self) -> usize {
        self.instances.len()
    }

    pub fn n_dims(&self) -> usize {
        self.instances[0].n_dims()
    }

    pub fn series_length(&self) -> usize {
        self.instances[0].series_length()
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.instances.iter().map(|i| i.label()).collect()
    }

    /// Same data under a different name.
    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Univariate view of one dimension.
    pub fn select_dim(&self, j: usize) -> Result<Dataset> {
        if j >= self.n_dims() {
            return Err(Error::Bounds {
                coordinate: "dimension",
                value: j,
                limit: self.n_dims(),
            });
        }
        let instances = self
            .instances
            .iter()
            .map(|inst| MultivariateInstance::new(vec![inst.dim(j).clone()], inst.label()))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(self.name.clone(), instances, self.classes.clone())
    }
}

/// Mean, population standard deviation, and whether the slice is flat.
#[inline]
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64, bool) {
    let len = values.len() as f64;
    let mut sum = 0.0;
    let mut max_abs = 0.0f64;
    for &v in values {
        sum += v;
        max_abs = max_abs.max(v.abs());
    }
    let mean = sum / len;
    let mut ss = 0.0;
    for &v in values {
        let dv = v - mean;
        ss += dv * dv;
    }
    let std = (ss / len).sqrt();
    let flat = std <= FLAT_RELATIVE_STD * max_abs || max_abs == 0.0;
    (mean, std, flat)
}

/// Z-normalises with the population standard deviation. Flat input maps to
/// all zeros.
pub fn z_normalize(values: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    z_normalize_into(values, &mut out);
    out
}

pub(crate) fn z_normalize_into(values: &[f64], out: &mut [f64]) {
    let (mean, std, flat) = mean_std(values);
    if flat {
        out.iter_mut().for_each(|o| *o = 0.0);
    } else {
        for (o, &v) in out.iter_mut().zip(values) {
            *o = (v - mean) / std;
        }
    }
}

/// Contiguous slice `[start, start + len)` of dimension `dim`.
pub fn subsequence(instance: &MultivariateInstance, dim: usize, start: usize, len: usize) -> Result<TimeSeries> {
    let d = instance.n_dims();
    let m = instance.series_length();
    if dim >= d {
        return Err(Error::Bounds {
            coordinate: "dimension",
            value: dim,
            limit: d,
        });
    }
    if len == 0 {
        return Err(Error::Bounds {
            coordinate: "length",
            value: 0,
            limit: m,
        });
    }
    if start >= m {
        return Err(Error::Bounds {
            coordinate: "start",
            value: start,
            limit: m,
        });
    }
    if start + len > m {
        return Err(Error::Bounds {
            coordinate: "start + length",
            value: start + len,
            limit: m,
        });
    }
    Ok(TimeSeries(instance.dim(dim)[start..start + len].to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn popstd(v: &[f64]) -> f64 {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
    }

    #[test]
    fn z_normalize_constant_is_zero() {
        assert_eq!(z_normalize(&[5.0, 5.0, 5.0]), vec![0.0, 0.0, 0.0]);
        assert_eq!(z_normalize(&[0.1, 0.1, 0.1]), vec![0.0, 0.0, 0.0]);
        assert_eq!(z_normalize(&[42.0]), vec![0.0]);
        assert_eq!(z_normalize(&[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn z_normalize_worked_example() {
        // mean 2, population std sqrt(2/3)
        let z = z_normalize(&[1.0, 2.0, 3.0]);
        let expected = [-1.224_744_871_391_589, 0.0, 1.224_744_871_391_589];
        for (a, b) in z.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn time_series_rejects_bad_values() {
        assert!(TimeSeries::new(vec![]).is_err());
        assert!(TimeSeries::new(vec![1.0, f64::NAN]).is_err());
        assert!(TimeSeries::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn subsequence_slices_and_checks_bounds() {
        let inst = MultivariateInstance::from_values(vec![vec![1.0, 2.0, 3.0, 4.0]], "a").unwrap();
        assert_eq!(subsequence(&inst, 0, 1, 2).unwrap().values(), &[2.0, 3.0]);
        assert_eq!(subsequence(&inst, 0, 0, 4).unwrap().values(), inst.dim(0).values());
        let err = subsequence(&inst, 0, 3, 2).unwrap_err();
        assert!(err.to_string().contains("start + length"), "{err}");
        let err = subsequence(&inst, 1, 0, 1).unwrap_err();
        assert!(err.to_string().contains("dimension"), "{err}");
        assert!(subsequence(&inst, 0, 0, 0).is_err());
    }

    #[test]
    fn dataset_invariants() {
        let a = MultivariateInstance::from_values(vec![vec![1.0, 2.0]], "a").unwrap();
        let b = MultivariateInstance::from_values(vec![vec![1.0, 2.0, 3.0]], "b").unwrap();
        assert!(Dataset::from_instances("x", vec![a.clone(), b]).is_err());
        assert!(Dataset::new("x", vec![a.clone()], vec!["b".into()]).is_err());
        assert!(Dataset::new("x", vec![], vec![]).is_err());
        assert!(MultivariateInstance::from_values(vec![vec![1.0], vec![1.0, 2.0]], "a").is_err());
        let ds = Dataset::from_instances("x", vec![a]).unwrap();
        assert_eq!(
            (ds.n_instances(), ds.n_dims(), ds.series_length(), ds.n_classes()),
            (1, 1, 2, 1)
        );
    }

    proptest! {
        #[test]
        fn z_normalize_moments_and_idempotence(
            values in proptest::collection::vec(-1e3f64..1e3, 2..64)
        ) {
            let z = z_normalize(&values);
            let (_, std, flat) = mean_std(&values);
            prop_assume!(!flat && std > 1e-6);
            let mean = z.iter().sum::<f64>() / z.len() as f64;
            prop_assert!(mean.abs() < 1e-9);
            prop_assert!((popstd(&z) - 1.0).abs() < 1e-9);
            let zz = z_normalize(&z);
            for (a, b) in z.iter().zip(&zz) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
