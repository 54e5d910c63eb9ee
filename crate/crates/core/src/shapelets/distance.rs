use super::{ShapeletCandidate, ShapeletVariant};
use crate::data::MultivariateInstance;
use crate::distances::{min_sliding_sq, sliding_sq_profile};
use crate::error::{Error, Result};

fn check_shape(s: &ShapeletCandidate, instance: &MultivariateInstance) -> Result<()> {
    let m = instance.series_length();
    let d = instance.n_dims();
    if s.length == 0 || s.length > m {
        return Err(Error::Dimension(format!(
            "shapelet of length {} cannot slide along series of length {m}",
            s.length
        )));
    }
    if s.channels.iter().any(|c| c.len() != s.length) {
        return Err(Error::Dimension("shapelet channels disagree with its length".into()));
    }
    match s.variant {
        ShapeletVariant::Independent => {
            let dim = s.origin_dim.unwrap_or(usize::MAX);
            if s.channels.len() != 1 || dim >= d {
                return Err(Error::Dimension(format!(
                    "independent shapelet needs one channel and a source dimension below {d}"
                )));
            }
        }
        _ => {
            if s.channels.len() != d {
                return Err(Error::Dimension(format!(
                    "{}-channel shapelet against a {d}-dimensional instance",
                    s.channels.len()
                )));
            }
        }
    }
    Ok(())
}

/// Distance from a shapelet to an instance under the shapelet's variant.
///
/// * Independent: sliding distance along the source channel only.
/// * MultiDependent: per-channel squared distances summed at each offset;
///   the best shared offset wins.
/// * MultiIndependent: sum over channels of each channel's own sliding
///   distance.
pub fn shapelet_distance(s: &ShapeletCandidate, instance: &MultivariateInstance) -> Result<f64> {
    check_shape(s, instance)?;
    let mut scratch = Vec::with_capacity(instance.series_length() - s.length + 1);
    Ok(match s.variant {
        ShapeletVariant::Independent => {
            let dim = s.origin_dim.expect("checked above");
            min_sliding_sq(&s.channels[0], instance.dim(dim), s.normalized, &mut scratch).sqrt()
        }
        ShapeletVariant::MultiDependent => {
            let mut total = vec![0.0; instance.series_length() - s.length + 1];
            for (channel, series) in s.channels.iter().zip(instance.dims()) {
                sliding_sq_profile(channel, series, s.normalized, &mut scratch);
                for (t, d) in total.iter_mut().zip(&scratch) {
                    *t += d;
                }
            }
            total.into_iter().fold(f64::INFINITY, f64::min).sqrt()
        }
        ShapeletVariant::MultiIndependent => {
            let mut total = 0.0;
            for (channel, series) in s.channels.iter().zip(instance.dims()) {
                total += min_sliding_sq(channel, series, s.normalized, &mut scratch).sqrt();
            }
            total
        }
    })
}
