use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Largest number of non-zero differences handled with the exact null
/// distribution; larger samples use the normal approximation.
pub const EXACT_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// Sum of ranks of the positive differences.
    pub w_plus: f64,
    /// Pairs left after discarding zero differences.
    pub n: usize,
    /// Two-sided p-value.
    pub p_value: f64,
    pub exact: bool,
}

/// Twice the average rank of each |difference|; integral even with ties.
/// Also returns the tie group sizes.
fn doubled_ranks(abs: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let n = abs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| abs[a].total_cmp(&abs[b]));
    let mut ranks = vec![0u64; n];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && abs[order[end + 1]] == abs[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end+1; doubled mean = first + last
        let doubled = (start + 1 + end + 1) as u64;
        for &i in &order[start..=end] {
            ranks[i] = doubled;
        }
        ties.push(end - start + 1);
        start = end + 1;
    }
    (ranks, ties)
}

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are discarded and tied magnitudes share their average
/// rank. Up to [`EXACT_LIMIT`] remaining pairs the p-value comes from the
/// exact permutation distribution of the (tied) ranks; beyond that from the
/// tie-corrected normal approximation with continuity correction. If every
/// difference is zero the p-value is 1.
pub fn wilcoxon_signed_rank_test(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::Statistics(format!(
            "paired samples of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Statistics("paired samples are empty".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Statistics("paired samples contain non-finite values".into()));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            w_plus: 0.0,
            n: 0,
            p_value: 1.0,
            exact: true,
        });
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = doubled_ranks(&abs);
    let total: u64 = ranks.iter().sum();
    let observed: u64 = ranks
        .iter()
        .zip(&diffs)
        .filter(|(_, d)| **d > 0.0)
        .map(|(r, _)| r)
        .sum();
    let w_plus = observed as f64 / 2.0;

    if n <= EXACT_LIMIT {
        // counts[s] = number of sign assignments whose positive doubled ranks sum to s
        let mut counts = vec![0u64; total as usize + 1];
        counts[0] = 1;
        let mut reach = 0usize;
        for &r in &ranks {
            let r = r as usize;
            for s in (0..=reach).rev() {
                if counts[s] != 0 {
                    counts[s + r] += counts[s];
                }
            }
            reach += r;
        }
        let observed_dev = (2 * observed).abs_diff(total);
        let extreme: u64 = counts
            .iter()
            .enumerate()
            .filter(|(s, _)| (2 * *s as u64).abs_diff(total) >= observed_dev)
            .map(|(_, c)| c)
            .sum();
        let p_value = extreme as f64 / (1u64 << n) as f64;
        return Ok(WilcoxonResult {
            w_plus,
            n,
            p_value,
            exact: true,
        });
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let variance = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    let p_value = erfc(z / std::f64::consts::SQRT_2).clamp(f64::MIN_POSITIVE, 1.0);
    Ok(WilcoxonResult {
        w_plus,
        n,
        p_value,
        exact: false,
    })
}

/// Two-sided p-value of [`wilcoxon_signed_rank_test`].
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<f64> {
    wilcoxon_signed_rank_test(a, b).map(|r| r.p_value)
}
