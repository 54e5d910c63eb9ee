//! Rigid and elastic distance kernels.
//!
//! Euclidean distance, the sliding-window subsequence distance used by
//! shapelets, and dynamic time warping in its univariate and multivariate
//! (dependent / independent / adaptive) forms.

mod dtw;

pub use dtw::{dtw, dtw_a_select, dtw_d, dtw_i, loo_accuracy, multivariate_dtw, DtwVariant, WarpingWindow};

use crate::data::{mean_std, z_normalize};
use crate::error::{Error, Result};

fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Plain Euclidean distance between equal-length series.
pub fn euclidean_dist(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "euclidean distance needs equal lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(squared_euclidean(a, b).sqrt())
}

/// Squared distance from `shapelet` to every `shapelet.len()` window of
/// `series`, appended to `out` in offset order.
///
/// With `normalize`, each window is z-normalised before comparison; the
/// shapelet is used as given, so callers pass it already normalised.
pub(crate) fn sliding_sq_profile(shapelet: &[f64], series: &[f64], normalize: bool, out: &mut Vec<f64>) {
    let len = shapelet.len();
    debug_assert!(len >= 1 && len <= series.len());
    out.clear();
    for window in series.windows(len) {
        let d = if normalize {
            let (mean, std, flat) = mean_std(window);
            if flat {
                shapelet.iter().map(|s| s * s).sum()
            } else {
                shapelet
                    .iter()
                    .zip(window)
                    .map(|(s, w)| {
                        let diff = s - (w - mean) / std;
                        diff * diff
                    })
                    .sum()
            }
        } else {
            squared_euclidean(shapelet, window)
        };
        out.push(d);
    }
}

/// Minimum squared distance of an already-prepared shapelet over all windows.
pub(crate) fn min_sliding_sq(shapelet: &[f64], series: &[f64], normalize: bool, scratch: &mut Vec<f64>) -> f64 {
    sliding_sq_profile(shapelet, series, normalize, scratch);
    scratch.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Sliding-window subsequence distance: the smallest Euclidean distance
/// between `s` and any equal-length window of `t`.
///
/// With `normalize`, `s` and every window are z-normalised first.
pub fn sdist(s: &[f64], t: &[f64], normalize: bool) -> Result<f64> {
    if s.is_empty() || s.len() > t.len() {
        return Err(Error::Dimension(format!(
            "subsequence of length {} cannot slide along a series of length {}",
            s.len(),
            t.len()
        )));
    }
    let mut scratch = Vec::with_capacity(t.len() - s.len() + 1);
    let d = if normalize {
        min_sliding_sq(&z_normalize(s), t, true, &mut scratch)
    } else {
        min_sliding_sq(s, t, false, &mut scratch)
    };
    Ok(d.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_examples() {
        assert_eq!(euclidean_dist(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(euclidean_dist(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert!(matches!(
            euclidean_dist(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn sdist_examples() {
        let t = [5.0, 1.0, 2.0, 9.0];
        assert_eq!(sdist(&[1.0, 2.0], &t, false).unwrap(), 0.0);
        assert_eq!(sdist(&[1.0, 2.0], &t, true).unwrap(), 0.0);
        assert_eq!(sdist(&t, &t, false).unwrap(), 0.0);
        assert_eq!(sdist(&t, &t, true).unwrap(), 0.0);
        assert!(matches!(
            sdist(&[1.0, 2.0, 3.0], &[1.0, 2.0], false),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn sdist_flat_windows_compare_as_zeros() {
        // z-normalised [1,2] is [-1,1]; the flat window [3,3] becomes [0,0].
        let d = sdist(&[1.0, 2.0], &[3.0, 3.0], true).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
    }
}
