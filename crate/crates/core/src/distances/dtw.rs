use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, MultivariateInstance};
use crate::error::{Error, Result};

/// Sakoe-Chiba band half-width as a fraction of the series length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WarpingWindow(f64);

impl WarpingWindow {
    pub const FULL: WarpingWindow = WarpingWindow(1.0);

    pub fn new(fraction: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::Config(format!("warping window {fraction} is not in [0, 1]")));
        }
        Ok(WarpingWindow(fraction))
    }

    pub fn fraction(self) -> f64 {
        self.0
    }

    /// Largest legal |i - j| for series of length `m`.
    pub fn band(self, m: usize) -> usize {
        ((self.0 * m as f64).ceil() as usize).min(m)
    }
}

impl Default for WarpingWindow {
    fn default() -> Self {
        WarpingWindow::FULL
    }
}

/// Multivariate DTW flavour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DtwVariant {
    /// One warping path per dimension; distances summed.
    Independent,
    /// One shared warping path over summed per-dimension cell costs.
    Dependent,
    /// Chosen per dataset; must be resolved with [`dtw_a_select`] before use.
    Adaptive,
}

/// Accumulated-cost DTW over an `m x m` grid restricted to `|i - j| <= band`.
fn dtw_grid(m: usize, band: usize, cost: impl Fn(usize, usize) -> f64) -> f64 {
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut curr = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for i in 1..=m {
        let lo = i.saturating_sub(band).max(1);
        let hi = (i + band).min(m);
        curr[lo - 1] = f64::INFINITY;
        for j in lo..=hi {
            let best = prev[j - 1].min(prev[j]).min(curr[j - 1]);
            curr[j] = cost(i - 1, j - 1) + best;
        }
        if hi < m {
            curr[hi + 1] = f64::INFINITY;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[m]
}

/// Univariate DTW with squared-difference cell cost. The accumulated cost is
/// returned without a square root.
pub fn dtw(a: &[f64], b: &[f64], window: WarpingWindow) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Dimension(format!(
            "dtw needs equal, non-zero lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let m = a.len();
    Ok(dtw_grid(m, window.band(m), |i, j| {
        let d = a[i] - b[j];
        d * d
    }))
}

fn check_pair(q: &MultivariateInstance, c: &MultivariateInstance) -> Result<()> {
    if q.n_dims() != c.n_dims() || q.series_length() != c.series_length() {
        return Err(Error::Dimension(format!(
            "instances are {}x{} and {}x{}",
            q.n_dims(),
            q.series_length(),
            c.n_dims(),
            c.series_length()
        )));
    }
    Ok(())
}

/// Dependent multivariate DTW: a single path whose cell cost is the sum of
/// squared differences over all dimensions.
pub fn dtw_d(q: &MultivariateInstance, c: &MultivariateInstance, window: WarpingWindow) -> Result<f64> {
    check_pair(q, c)?;
    let m = q.series_length();
    let qd = q.dims();
    let cd = c.dims();
    Ok(dtw_grid(m, window.band(m), |i, j| {
        qd.iter()
            .zip(cd)
            .map(|(x, y)| {
                let d = x[i] - y[j];
                d * d
            })
            .sum()
    }))
}

/// Independent multivariate DTW: the sum of per-dimension DTW costs.
pub fn dtw_i(q: &MultivariateInstance, c: &MultivariateInstance, window: WarpingWindow) -> Result<f64> {
    check_pair(q, c)?;
    let mut total = 0.0;
    for (x, y) in q.dims().iter().zip(c.dims()) {
        total += dtw(x, y, window)?;
    }
    Ok(total)
}

/// Dispatches to [`dtw_i`] or [`dtw_d`].
pub fn multivariate_dtw(
    variant: DtwVariant,
    q: &MultivariateInstance,
    c: &MultivariateInstance,
    window: WarpingWindow,
) -> Result<f64> {
    match variant {
        DtwVariant::Independent => dtw_i(q, c, window),
        DtwVariant::Dependent => dtw_d(q, c, window),
        DtwVariant::Adaptive => Err(Error::Config(
            "adaptive DTW must be resolved against training data first".into(),
        )),
    }
}

/// Leave-one-out 1-NN accuracy on `train` under a resolved DTW variant.
/// Distance ties go to the lowest index.
pub fn loo_accuracy(train: &Dataset, variant: DtwVariant, window: WarpingWindow) -> Result<f64> {
    let n = train.n_instances();
    if n < 2 {
        return Err(Error::Statistics("leave-one-out needs at least two instances".into()));
    }
    let hits = (0..n)
        .into_par_iter()
        .map(|i| -> Result<usize> {
            let query = train.instance(i);
            let mut best = (f64::INFINITY, usize::MAX);
            for j in (0..n).filter(|&j| j != i) {
                let d = multivariate_dtw(variant, query, train.instance(j), window)?;
                if d < best.0 || best.1 == usize::MAX {
                    best = (d, j);
                }
            }
            Ok(usize::from(train.instance(best.1).label() == query.label()))
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(hits as f64 / n as f64)
}

/// Resolves adaptive DTW for a dataset: whichever of the independent and
/// dependent variants scores the higher leave-one-out training accuracy,
/// with ties going to dependent.
pub fn dtw_a_select(train: &Dataset, window: WarpingWindow) -> Result<DtwVariant> {
    let independent = loo_accuracy(train, DtwVariant::Independent, window)?;
    let dependent = loo_accuracy(train, DtwVariant::Dependent, window)?;
    Ok(if independent > dependent {
        DtwVariant::Independent
    } else {
        DtwVariant::Dependent
    })
}
