//! Brute-force reference implementations. None of these share code paths with
//! the library kernels they check.
#![allow(dead_code)]

use rand::Rng;

/// Population z-normalisation written out longhand; flat input maps to zeros.
pub fn znorm(v: &[f64]) -> Vec<f64> {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let max_abs = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if var.sqrt() <= 1e-12 * max_abs || max_abs == 0.0 {
        return vec![0.0; v.len()];
    }
    v.iter().map(|x| (x - mean) / var.sqrt()).collect()
}

/// Exhaustive minimum Euclidean distance over every window.
pub fn sdist_exhaustive(s: &[f64], t: &[f64], normalize: bool) -> f64 {
    let s = if normalize { znorm(s) } else { s.to_vec() };
    let mut best = f64::INFINITY;
    for start in 0..=(t.len() - s.len()) {
        let w = &t[start..start + s.len()];
        let w = if normalize { znorm(w) } else { w.to_vec() };
        let mut acc = 0.0;
        for i in 0..s.len() {
            acc += (s[i] - w[i]).powi(2);
        }
        best = best.min(acc.sqrt());
    }
    best
}

/// Minimum path cost over every monotone, continuous warping path with
/// `|i - j| <= band`, by explicit enumeration.
pub fn dtw_enumerate(m: usize, band: usize, cost: &dyn Fn(usize, usize) -> f64) -> f64 {
    fn walk(i: usize, j: usize, m: usize, band: usize, acc: f64, cost: &dyn Fn(usize, usize) -> f64, best: &mut f64) {
        if i.abs_diff(j) > band {
            return;
        }
        let acc = acc + cost(i, j);
        if i == m - 1 && j == m - 1 {
            *best = best.min(acc);
            return;
        }
        if i + 1 < m {
            walk(i + 1, j, m, band, acc, cost, best);
        }
        if j + 1 < m {
            walk(i, j + 1, m, band, acc, cost, best);
        }
        if i + 1 < m && j + 1 < m {
            walk(i + 1, j + 1, m, band, acc, cost, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(0, 0, m, band, 0.0, cost, &mut best);
    best
}

fn h(pos: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = pos as f64 / total as f64;
    let mut e = 0.0;
    for q in [p, 1.0 - p] {
        if q > 0.0 {
            e -= q * q.log2();
        }
    }
    e
}

/// Tries every midpoint threshold and partitions with `d <= t`.
pub fn information_gain_bruteforce(d: &[f64], labels: &[bool]) -> f64 {
    let n = d.len();
    let pos = labels.iter().filter(|l| **l).count();
    let parent = h(pos, n);
    let mut sorted: Vec<f64> = d.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut best = 0.0f64;
    for w in sorted.windows(2) {
        let t = (w[0] + w[1]) / 2.0;
        let (mut ln, mut lp, mut rn, mut rp) = (0, 0, 0, 0);
        for (x, &l) in d.iter().zip(labels) {
            if *x <= t {
                ln += 1;
                lp += usize::from(l);
            } else {
                rn += 1;
                rp += usize::from(l);
            }
        }
        let gain = parent - ln as f64 / n as f64 * h(lp, ln) - rn as f64 / n as f64 * h(rp, rn);
        best = best.max(gain);
    }
    best
}

/// Two-sided signed-rank p-value by enumerating all 2^n sign assignments.
pub fn wilcoxon_enumerate(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|x| *x != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return 1.0;
    }
    let ranks: Vec<f64> = d
        .iter()
        .map(|x| {
            let below = d.iter().filter(|y| y.abs() < x.abs()).count() as f64;
            let tied = d.iter().filter(|y| y.abs() == x.abs()).count() as f64;
            below + (tied + 1.0) / 2.0
        })
        .collect();
    let total: f64 = ranks.iter().sum();
    let observed: f64 = ranks.iter().zip(&d).filter(|(_, x)| **x > 0.0).map(|(r, _)| r).sum();
    let dev = (observed - total / 2.0).abs();
    let mut extreme = 0u64;
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if (w - total / 2.0).abs() >= dev {
            extreme += 1;
        }
    }
    extreme as f64 / (1u64 << n) as f64
}

pub fn random_series<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-3.0..3.0)).collect()
}
