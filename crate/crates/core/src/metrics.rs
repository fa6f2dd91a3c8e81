//! Evaluation: adjusted Rand index with the trimmed label treated as an
//! ordinary class, and robust summaries of replicated scores.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Partition;

/// Consistency constant of the Sn scale estimator at the normal model.
pub const SN_CONSTANT: f64 = 1.1926;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub ari: f64,
    pub n_items: usize,
}

fn comb2(x: f64) -> f64 {
    x * (x - 1.0) / 2.0
}

/// True when the two labelings induce the same partition.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut fwd = HashMap::new();
    let mut bwd = HashMap::new();
    a.iter().zip(b).all(|(&x, &y)| *fwd.entry(x).or_insert(y) == y && *bwd.entry(y).or_insert(x) == x)
}

/// Adjusted Rand index between two labelings of the same items.
///
/// Label 0 is an ordinary class. When the chance-corrected denominator
/// vanishes (e.g. both labelings all-singletons) the result is 1 for
/// identical partitions and 0 otherwise.
pub fn ari_labels(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len() as f64;
    let mut cells: HashMap<(usize, usize), f64> = HashMap::new();
    let mut rows: HashMap<usize, f64> = HashMap::new();
    let mut cols: HashMap<usize, f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *cells.entry((x, y)).or_default() += 1.0;
        *rows.entry(x).or_default() += 1.0;
        *cols.entry(y).or_default() += 1.0;
    }
    let index: f64 = cells.values().map(|&c| comb2(c)).sum();
    let sum_a: f64 = rows.values().map(|&c| comb2(c)).sum();
    let sum_b: f64 = cols.values().map(|&c| comb2(c)).sum();
    let total = comb2(n);
    let expected = if total > 0.0 { sum_a * sum_b / total } else { 0.0 };
    let max_index = 0.5 * (sum_a + sum_b);
    let denom = max_index - expected;
    if denom == 0.0 {
        return Ok(if same_partition(a, b) { 1.0 } else { 0.0 });
    }
    Ok((index - expected) / denom)
}

pub fn ari(a: &Partition, b: &Partition) -> Result<f64> {
    ari_labels(a.labels(), b.labels())
}

pub fn score(predicted: &Partition, truth: &Partition) -> Result<Score> {
    Ok(Score { ari: ari(predicted, truth)?, n_items: truth.len() })
}

/// ARI restricted to items retained (non-zero) in both labelings.
pub fn ari_jointly_retained(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let (ra, rb): (Vec<usize>, Vec<usize>) =
        a.iter().zip(b).filter(|(&x, &y)| x != 0 && y != 0).map(|(&x, &y)| (x, y)).unzip();
    ari_labels(&ra, &rb)
}

/// Median; even lengths average the central pair.
pub fn median(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyVector);
    }
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// `k`-th smallest (1-based) of the union of two ascending sequences given
/// by accessor functions.
fn kth_of_two(len_a: usize, a: impl Fn(usize) -> f64, len_b: usize, b: impl Fn(usize) -> f64, k: usize) -> f64 {
    debug_assert!(k >= 1 && k <= len_a + len_b);
    // number of elements taken from `a`
    let (mut lo, mut hi) = (k.saturating_sub(len_b), k.min(len_a));
    loop {
        let ta = (lo + hi) / 2;
        let tb = k - ta;
        if ta < len_a && tb > 0 && b(tb - 1) > a(ta) {
            lo = ta + 1;
        } else if ta > 0 && tb < len_b && a(ta - 1) > b(tb) {
            hi = ta - 1;
        } else {
            let left_a = if ta > 0 { a(ta - 1) } else { f64::NEG_INFINITY };
            let left_b = if tb > 0 { b(tb - 1) } else { f64::NEG_INFINITY };
            return left_a.max(left_b);
        }
    }
}

/// Sn scale estimator `c * lomed_i himed_j |x_i - x_j|`.
///
/// The inner high median is the `(floor(n/2) + 1)`-th order statistic of
/// the `n` distances from `x_i` (the zero at `j = i` included); the outer
/// low median is the `floor((n+1)/2)`-th order statistic. No small-sample
/// correction beyond `c = 1.1926` is applied. After sorting, each inner
/// order statistic is a selection from two sorted runs, so the whole
/// estimate costs `O(n log n)`.
pub fn sn_scale(x: &[f64]) -> Result<f64> {
    let n = x.len();
    if n < 2 {
        return Err(Error::TooFewValues { needed: 2, got: n });
    }
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let inner_rank = n / 2 + 1;
    let mut inner = Vec::with_capacity(n);
    for i in 0..n {
        // distances to the left and right of s[i], each ascending; the
        // self-distance zero is the overall smallest
        let v = if inner_rank == 1 {
            0.0
        } else {
            let left = |t: usize| s[i] - s[i - 1 - t];
            let right = |t: usize| s[i + 1 + t] - s[i];
            kth_of_two(i, left, n - 1 - i, right, inner_rank - 1)
        };
        inner.push(v);
    }
    inner.sort_by(f64::total_cmp);
    Ok(SN_CONSTANT * inner[(n + 1) / 2 - 1])
}

/// Median with an Sn band, as used to summarise replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub median: f64,
    /// Zero for a single value.
    pub sn: f64,
    pub count: usize,
}

impl Summary {
    pub fn lower(&self) -> f64 {
        self.median - self.sn
    }

    pub fn upper(&self) -> f64 {
        self.median + self.sn
    }
}

pub fn summarize(x: &[f64]) -> Result<Summary> {
    let median = median(x)?;
    let sn = if x.len() >= 2 { sn_scale(x)? } else { 0.0 };
    Ok(Summary { median, sn, count: x.len() })
}

/// Percentage computing-time gain `|t - t_ref| / t_ref * 100`.
pub fn percentage_gain(t: f64, t_ref: f64) -> f64 {
    (t - t_ref).abs() / t_ref * 100.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    use tkmerge_oracle::{ari_by_pairs, sn_by_double_loop};

    #[test]
    fn relabeled_is_one() {
        assert_eq!(ari_labels(&[1, 1, 2, 2], &[2, 2, 1, 1]).unwrap(), 1.0);
    }

    #[test]
    fn one_block_vs_singletons_is_zero() {
        assert_eq!(ari_labels(&[1, 1, 1, 1], &[1, 2, 3, 4]).unwrap(), 0.0);
    }

    #[test]
    fn trimmed_label_is_a_class() {
        let a = [1, 1, 0, 2, 2, 0];
        let b = [1, 1, 1, 2, 2, 2];
        // pairs together in a: (0,1),(3,4),(2,5) -> 3; in b: 3 + 3 = 6; both: (0,1),(3,4) -> 2
        // expected = 3*6/15 = 1.2, max = 4.5 -> (2 - 1.2)/(4.5 - 1.2)
        let want = 0.8 / 3.3;
        assert_relative_eq!(ari_labels(&a, &b).unwrap(), want, epsilon = 1e-15);
        assert_relative_eq!(ari_by_pairs(&a, &b), want, epsilon = 1e-15);
    }

    #[test]
    fn singletons_vs_singletons() {
        assert_eq!(ari_labels(&[1, 2, 3], &[3, 1, 2]).unwrap(), 1.0);
        assert_eq!(ari_labels(&[5], &[1]).unwrap(), 1.0);
    }

    #[test]
    fn length_mismatch() {
        assert_eq!(ari_labels(&[1, 2], &[1]), Err(Error::LengthMismatch(2, 1)));
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]).unwrap(), 2.5);
        assert_eq!(median(&[5.0]).unwrap(), 5.0);
        assert_eq!(median(&[]), Err(Error::EmptyVector));
        assert_relative_eq!(summarize(&[0.8, 0.9, 1.0]).unwrap().median, 0.9);
    }

    #[test]
    fn sn_small_example() {
        // inner high medians (3rd smallest of 5 distances) for 1,2,3,5,8:
        // 1: {0,1,2,4,7} -> 2; 2: {1,0,1,3,6} -> 1; 3: {2,1,0,2,5} -> 2;
        // 5: {4,3,2,0,3} -> 3; 8: {7,6,5,3,0} -> 5; low median of {1,2,2,3,5} = 2
        let x = [1.0, 2.0, 3.0, 5.0, 8.0];
        assert_relative_eq!(sn_by_double_loop(&x), 2.0 * SN_CONSTANT, epsilon = 1e-15);
        assert_relative_eq!(sn_scale(&x).unwrap(), 2.0 * SN_CONSTANT, epsilon = 1e-15);
    }

    #[test]
    fn sn_degenerate() {
        assert_eq!(sn_scale(&[3.0; 7]).unwrap(), 0.0);
        assert_eq!(sn_scale(&[1.0]), Err(Error::TooFewValues { needed: 2, got: 1 }));
        assert!(sn_scale(&[1.0, 2.0]).unwrap() > 0.0);
    }

    #[test]
    fn gain_formula() {
        assert_eq!(percentage_gain(3.0, 3.0), 0.0);
        assert_relative_eq!(percentage_gain(1.0, 4.0), 75.0);
    }

    proptest! {
        #[test]
        fn ari_matches_pair_enumeration(
            pairs in proptest::collection::vec((0usize..5, 0usize..4), 2..50)
        ) {
            let (a, b): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
            let fast = ari_labels(&a, &b).unwrap();
            prop_assert!((fast - ari_by_pairs(&a, &b)).abs() <= 1e-12);
            prop_assert!((fast - ari_labels(&b, &a).unwrap()).abs() <= 1e-12);
            prop_assert!(fast <= 1.0 + 1e-12);
        }

        #[test]
        fn ari_relabel_invariant(labels in proptest::collection::vec(0usize..4, 2..40), other in proptest::collection::vec(0usize..3, 40)) {
            let other = &other[..labels.len()];
            let relabeled: Vec<usize> = labels.iter().map(|&l| (l * 7 + 3) % 11).collect();
            prop_assert!((ari_labels(&labels, other).unwrap() - ari_labels(&relabeled, other).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn sn_matches_double_loop(x in proptest::collection::vec(-100.0f64..100.0, 2..120)) {
            prop_assert_eq!(sn_scale(&x).unwrap(), sn_by_double_loop(&x));
        }

        #[test]
        fn sn_with_ties_matches_double_loop(x in proptest::collection::vec(0i32..6, 2..60)) {
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            prop_assert_eq!(sn_scale(&x).unwrap(), sn_by_double_loop(&x));
        }

        #[test]
        fn sn_equivariance(x in proptest::collection::vec(-50.0f64..50.0, 2..60), c in 0.1f64..10.0, shift in -100.0f64..100.0) {
            let base = sn_scale(&x).unwrap();
            let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
            let shifted: Vec<f64> = x.iter().map(|v| v + shift).collect();
            prop_assert!((sn_scale(&scaled).unwrap() - c * base).abs() <= 1e-9 * (1.0 + c * base));
            prop_assert!((sn_scale(&shifted).unwrap() - base).abs() <= 1e-9 * (1.0 + base + shift.abs()));
        }
    }
}
