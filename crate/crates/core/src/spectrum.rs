//! Comparing floating-point spectra as multisets.
//!
//! Two spectra are paired greedily: all cross distances are sorted and the
//! closest unpaired couple is matched first. The largest matched distance is
//! the comparison metric.

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct Matching {
    /// `(index in left, index in right, distance)`
    pub pairs: Vec<(usize, usize, f64)>,
    pub max_distance: f64,
}

pub fn greedy_match(left: &[Complex64], right: &[Complex64]) -> Matching {
    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(left.len() * right.len());
    for (i, a) in left.iter().enumerate() {
        for (j, b) in right.iter().enumerate() {
            candidates.push(((a - b).norm(), i, j));
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut left_used = vec![false; left.len()];
    let mut right_used = vec![false; right.len()];
    let mut pairs = Vec::with_capacity(left.len().min(right.len()));
    for (d, i, j) in candidates {
        if !left_used[i] && !right_used[j] {
            left_used[i] = true;
            right_used[j] = true;
            pairs.push((i, j, d));
            if pairs.len() == left.len().min(right.len()) {
                break;
            }
        }
    }
    let max_distance = pairs.iter().map(|p| p.2).fold(0.0, f64::max);
    Matching {
        pairs,
        max_distance,
    }
}

/// Largest matched distance, or infinity when the multisets differ in size.
pub fn multiset_distance(left: &[Complex64], right: &[Complex64]) -> f64 {
    if left.len() != right.len() {
        return f64::INFINITY;
    }
    greedy_match(left, right).max_distance
}

pub fn spectral_radius(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Indices of the `k` values closest to `target`, nearest first.
pub fn nearest(values: &[Complex64], target: Complex64, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        (values[a] - target)
            .norm()
            .total_cmp(&(values[b] - target).norm())
            .then(a.cmp(&b))
    });
    idx.truncate(k);
    idx
}

/// Distance from `value` to the closest element of `set`.
pub fn distance_to_set(value: Complex64, set: &[Complex64]) -> f64 {
    set.iter()
        .map(|s| (s - value).norm())
        .fold(f64::INFINITY, f64::min)
}
