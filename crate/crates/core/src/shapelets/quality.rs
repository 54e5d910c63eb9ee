use crate::error::{Error, Result};

/// One-vs-all encoding: `true` where the label equals `target`.
pub fn binary_labels<S: AsRef<str>>(labels: &[S], target: &str) -> Vec<bool> {
    labels.iter().map(|l| l.as_ref() == target).collect()
}

fn entropy(positives: usize, total: usize) -> f64 {
    if total == 0 || positives == 0 || positives == total {
        return 0.0;
    }
    let p = positives as f64 / total as f64;
    let q = 1.0 - p;
    -(p * p.log2() + q * q.log2())
}

/// Best information gain (bits) of a binary split of the orderline.
///
/// Thresholds sit between consecutive distinct distances, so tied distances
/// always fall on the same side.
pub fn information_gain(distances: &[f64], labels: &[bool]) -> Result<f64> {
    if distances.len() != labels.len() {
        return Err(Error::Statistics(format!(
            "{} distances but {} labels",
            distances.len(),
            labels.len()
        )));
    }
    let n = distances.len();
    if n < 2 {
        return Err(Error::Statistics("information gain needs at least two items".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| distances[a].total_cmp(&distances[b]));

    let positives = labels.iter().filter(|&&l| l).count();
    let parent = entropy(positives, n);
    if parent == 0.0 {
        return Ok(0.0);
    }
    let mut best = 0.0f64;
    let mut left_pos = 0;
    for (i, pair) in order.windows(2).enumerate() {
        if labels[pair[0]] {
            left_pos += 1;
        }
        if distances[pair[0]] == distances[pair[1]] {
            continue;
        }
        let left = i + 1;
        let right = n - left;
        let gain = parent
            - (left as f64 / n as f64) * entropy(left_pos, left)
            - (right as f64 / n as f64) * entropy(positives - left_pos, right);
        best = best.max(gain);
    }
    Ok(best.clamp(0.0, 1.0))
}
