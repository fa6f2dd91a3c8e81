//! Shared domain types: the data matrix, crisp partitions with a trimmed
//! label, fitted component models and the merge structures built on top of
//! them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances used by invariant checks across the crate.
pub mod tol {
    /// Maximum absolute asymmetry of a covariance matrix.
    pub const SYMMETRY: f64 = 1e-10;
    /// Smallest eigenvalue still accepted as positive semi-definite.
    pub const PSD: f64 = -1e-12;
    /// Allowed deviation of the mixing weights from summing to one.
    pub const WEIGHT_SUM: f64 = 1e-12;
    /// Relative slack on the eigenvalue-ratio constraint.
    pub const RATIO: f64 = 1e-8;
    /// Relative slack on per-iteration objective monotonicity.
    pub const MONOTONE: f64 = 1e-10;
}

/// Label reserved for trimmed observations.
pub const TRIMMED: usize = 0;

/// Number of observations kept by a fit with trimming level `alpha`,
/// i.e. `floor(n * (1 - alpha))`.
///
/// A tiny guard absorbs representation error so that, e.g., `n = 20`,
/// `alpha = 0.35` keeps 13 points rather than 12.
pub fn retained_count(n: usize, alpha: f64) -> usize {
    let exact = n as f64 * (1.0 - alpha);
    let floored = (exact + 1e-9 * exact.max(1.0)).floor();
    (floored.max(0.0) as usize).min(n)
}

/// Row-major `n x p` observation matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    values: Vec<f64>,
    n: usize,
    p: usize,
}

impl DataMatrix {
    /// Wraps a row-major buffer. Only the shape is checked here; finiteness
    /// is checked by [`validate_data`], which every fitter calls.
    pub fn new(values: Vec<f64>, n: usize, p: usize) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::EmptyData { n, p });
        }
        if values.len() != n * p {
            return Err(Error::ShapeMismatch { len: values.len(), n, p });
        }
        Ok(Self { values, n, p })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(n * p);
        for row in rows {
            if row.len() != p {
                return Err(Error::ShapeMismatch { len: row.len(), n: 1, p });
            }
            values.extend_from_slice(row);
        }
        Self::new(values, n, p)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.p)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[j])
    }

    /// Appends the rows of `other`, which must have the same width.
    pub fn vstack(&self, other: &DataMatrix) -> Result<DataMatrix> {
        if other.p != self.p {
            return Err(Error::ShapeMismatch { len: other.p, n: 1, p: self.p });
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        DataMatrix::new(values, self.n + other.n, self.p)
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> DataMatrix {
        DataMatrix {
            values: self.values.iter().map(|&v| f(v)).collect(),
            n: self.n,
            p: self.p,
        }
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> DataMatrix {
        let mut values = Vec::with_capacity(idx.len() * self.p);
        for &i in idx {
            values.extend_from_slice(self.row(i));
        }
        DataMatrix { values, n: idx.len(), p: self.p }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataWarning {
    /// Fewer observations than features.
    FewObservations { n: usize, p: usize },
    ConstantColumn(usize),
}

impl fmt::Display for DataWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataWarning::FewObservations { n, p } => write!(f, "n <= p ({n} observations, {p} features)"),
            DataWarning::ConstantColumn(j) => write!(f, "column {j} is constant"),
        }
    }
}

/// Checks that every entry is finite and reports soft problems.
pub fn validate_data(data: &DataMatrix) -> Result<Vec<DataWarning>> {
    for (i, row) in data.rows().enumerate() {
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteData { row: i, col: j });
        }
    }
    let mut warnings = Vec::new();
    if data.n() <= data.p() {
        warnings.push(DataWarning::FewObservations { n: data.n(), p: data.p() });
    }
    if data.n() > 1 {
        for j in 0..data.p() {
            let first = data.row(0)[j];
            if data.column(j).all(|v| v == first) {
                warnings.push(DataWarning::ConstantColumn(j));
            }
        }
    }
    Ok(warnings)
}

/// Crisp assignment of observations to groups `1..=k_groups`; label
/// [`TRIMMED`] marks observations excluded from every group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    k_groups: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, k_groups: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l > k_groups) {
            return Err(Error::InvalidParameter(format!(
                "label {bad} exceeds the number of groups {k_groups}"
            )));
        }
        Ok(Self { labels, k_groups })
    }

    /// Builds a partition whose group count is the largest label present.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let k_groups = labels.iter().copied().max().unwrap_or(0);
        Self { labels, k_groups }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }

    pub fn k_groups(&self) -> usize {
        self.k_groups
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_trimmed(&self) -> usize {
        self.labels.iter().filter(|&&l| l == TRIMMED).count()
    }

    pub fn n_retained(&self) -> usize {
        self.len() - self.n_trimmed()
    }

    pub fn is_trimmed(&self, i: usize) -> bool {
        self.labels[i] == TRIMMED
    }

    /// Group sizes indexed by `label - 1`.
    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k_groups];
        for &l in &self.labels {
            if l != TRIMMED {
                sizes[l - 1] += 1;
            }
        }
        sizes
    }

    /// One label per line.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.labels.len() * 3);
        for l in &self.labels {
            out.push_str(&l.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut labels = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let label = line.parse::<usize>().map_err(|_| {
                Error::InvalidParameter(format!("line {}: '{line}' is not a label", lineno + 1))
            })?;
            labels.push(label);
        }
        Ok(Self::from_labels(labels))
    }
}

/// Dense symmetric `p x p` matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    p: usize,
    values: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(p: usize) -> Self {
        Self { p, values: vec![0.0; p * p] }
    }

    pub fn scaled_identity(p: usize, s: f64) -> Self {
        let mut m = Self::zeros(p);
        for i in 0..p {
            m.values[i * p + i] = s;
        }
        m
    }

    pub fn from_row_major(p: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), p * p, "matrix buffer must be p*p");
        Self { p, values }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.p + j] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.p {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        (0..self.p).map(|i| self.get(i, i)).sum()
    }
}

/// How the covariances stored in a [`ClusterModel`] were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceKind {
    /// `SSE_j / (p * size_j) * I`, the spherical covariance implied by k-means.
    ScaledIdentity,
    /// Plain maximum-likelihood covariance of the assigned points.
    Empirical,
    /// Empirical covariance after the joint eigenvalue-ratio restriction.
    Restricted,
}

/// Per-component centroid, covariance, size and mixing weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub centroids: Vec<Vec<f64>>,
    pub covariances: Vec<SymMatrix>,
    pub sizes: Vec<usize>,
    pub weights: Vec<f64>,
    pub covariance_kind: CovarianceKind,
}

impl ClusterModel {
    pub fn n_components(&self) -> usize {
        self.centroids.len()
    }

    pub fn dim(&self) -> usize {
        self.centroids.first().map_or(0, Vec::len)
    }

    pub fn retained(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Checks symmetry, positive semi-definiteness and the weight sum.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let k = self.n_components();
        if self.covariances.len() != k || self.sizes.len() != k || self.weights.len() != k {
            return Err("component vectors have inconsistent lengths".into());
        }
        for (j, cov) in self.covariances.iter().enumerate() {
            if cov.max_asymmetry() > tol::SYMMETRY {
                return Err(format!("covariance {j} is not symmetric"));
            }
            let eig = crate::linalg::SymEigen::new(cov);
            let scale = eig.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            if eig.values.iter().any(|&v| v < tol::PSD * scale) {
                return Err(format!("covariance {j} has a negative eigenvalue"));
            }
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > tol::WEIGHT_SUM {
            return Err(format!("weights sum to {total}"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Euclidean distance between component centroids.
    EuclideanCentroid,
    /// One minus a Monte-Carlo estimate of the pairwise misclassification
    /// probability between fitted Gaussian components.
    DempMc,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclid" | "euclidean" | "euclidean_centroid" | "l2" => Ok(Metric::EuclideanCentroid),
            "demp" | "demp_mc" => Ok(Metric::DempMc),
            other => Err(Error::InvalidParameter(format!("unknown metric '{other}'"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::EuclideanCentroid => "euclid",
            Metric::DempMc => "demp",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Linkage {
    Single,
    Complete,
    Average,
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            other => Err(Error::InvalidParameter(format!("unknown linkage '{other}'"))),
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
        })
    }
}

/// Symmetric `k x k` dissimilarity between fitted components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dissimilarity {
    k: usize,
    d: Vec<f64>,
    pub metric: Metric,
}

impl Dissimilarity {
    /// Builds from a full row-major matrix, checking symmetry, the zero
    /// diagonal and finiteness.
    pub fn new(k: usize, d: Vec<f64>, metric: Metric) -> Result<Self> {
        if d.len() != k * k {
            return Err(Error::ShapeMismatch { len: d.len(), n: k, p: k });
        }
        for i in 0..k {
            if d[i * k + i] != 0.0 {
                return Err(Error::InvalidParameter(format!("diagonal entry {i} is not zero")));
            }
            for j in 0..k {
                let v = d[i * k + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidParameter(format!("entry ({i},{j}) = {v}")));
                }
                if v != d[j * k + i] {
                    return Err(Error::InvalidParameter(format!("entry ({i},{j}) is not symmetric")));
                }
            }
        }
        Ok(Self { k, d, metric })
    }

    /// Builds from a closure evaluated on the upper triangle.
    pub fn from_fn(k: usize, metric: Metric, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut d = vec![0.0; k * k];
        for i in 0..k {
            for j in (i + 1)..k {
                let v = f(i, j);
                d[i * k + j] = v;
                d[j * k + i] = v;
            }
        }
        Self { k, d, metric }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.k + j]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { k: self.k, d: self.d.iter().map(|v| v * c).collect(), metric: self.metric }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub node: usize,
}

/// Agglomeration history over `leaf_count` leaves. Leaves are nodes
/// `0..leaf_count`; the merge at step `s` creates node `leaf_count + s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub merges: Vec<Merge>,
    pub leaf_count: usize,
    pub linkage: Linkage,
}

impl Dendrogram {
    /// Plain-text merge list, one `left right height` line per merge.
    pub fn to_merge_list(&self) -> String {
        let mut out = String::new();
        for m in &self.merges {
            out.push_str(&format!("{} {} {}\n", m.left, m.right, m.height));
        }
        out
    }

    pub fn heights(&self) -> impl Iterator<Item = f64> + '_ {
        self.merges.iter().map(|m| m.height)
    }
}

/// Which first-step fitter a configuration selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Trimmed k-means first step.
    Tkm,
    /// TCLUST first step.
    Tc,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tkm" | "tkmeans" | "tk" => Ok(Method::Tkm),
            "tc" | "tclust" => Ok(Method::Tc),
            other => Err(Error::InvalidParameter(format!("unknown method '{other}'"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Tkm => "tkm",
            Method::Tc => "tc",
        })
    }
}

/// Inputs of a full two-step fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Number of final groups.
    pub big_k: usize,
    /// Number of first-step components.
    pub k: usize,
    pub alpha: f64,
    /// Eigenvalue restriction factor; `1` selects trimmed k-means.
    pub r: f64,
    pub metric: Metric,
    pub linkage: Linkage,
    pub n_starts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    /// Monte-Carlo draws per component for [`Metric::DempMc`].
    pub n_mc: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            big_k: 2,
            k: 2,
            alpha: 0.0,
            r: 1.0,
            metric: Metric::EuclideanCentroid,
            linkage: Linkage::Single,
            n_starts: 20,
            max_iter: 100,
            tol: 1e-8,
            seed: 0,
            n_mc: 10_000,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.big_k == 0 {
            return Err(Error::KOutOfRange { k: 0, max: self.k });
        }
        if self.big_k > self.k {
            return Err(Error::KGreaterThank { big_k: self.big_k, k: self.k });
        }
        check_alpha(self.alpha)?;
        if !(self.r >= 1.0) {
            return Err(Error::RestrictionOutOfRange(self.r));
        }
        if self.n_starts == 0 || self.max_iter == 0 {
            return Err(Error::InvalidParameter("n_starts and max_iter must be positive".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance {} must be >= 0", self.tol)));
        }
        Ok(())
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=0.5).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_formed_data_has_no_warnings() {
        let data = DataMatrix::new(vec![0.0, 1.0, 2.0, 3.0, 4.0, 6.0, 7.0, 5.0], 4, 2).unwrap();
        assert!(validate_data(&data).unwrap().is_empty());
    }

    #[test]
    fn wide_data_warns() {
        let vals: Vec<f64> = (0..15).map(|v| v as f64 * 1.5 + (v % 4) as f64).collect();
        let data = DataMatrix::new(vals, 3, 5).unwrap();
        let w = validate_data(&data).unwrap();
        assert!(w.contains(&DataWarning::FewObservations { n: 3, p: 5 }));
        assert_eq!(w[0].to_string(), "n <= p (3 observations, 5 features)");
    }

    #[test]
    fn nan_is_fatal() {
        let data = DataMatrix::new(vec![0.0, 1.0, f64::NAN, 3.0], 2, 2).unwrap();
        assert_eq!(validate_data(&data), Err(Error::NonFiniteData { row: 1, col: 0 }));
    }

    #[test]
    fn constant_column_warns() {
        let data = DataMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 3.0], vec![1.0, 5.0]]).unwrap();
        assert_eq!(validate_data(&data).unwrap(), vec![DataWarning::ConstantColumn(0)]);
    }

    #[test]
    fn shape_is_checked() {
        assert!(matches!(DataMatrix::new(vec![1.0; 5], 2, 3), Err(Error::ShapeMismatch { .. })));
        assert!(matches!(DataMatrix::new(vec![], 0, 3), Err(Error::EmptyData { .. })));
    }

    #[test]
    fn retained_count_guards_representation_error() {
        assert_eq!(retained_count(20, 0.35), 13);
        assert_eq!(retained_count(10, 0.3), 7);
        assert_eq!(retained_count(5, 0.2), 4);
        assert_eq!(retained_count(7, 0.5), 3);
        assert_eq!(retained_count(100, 0.0), 100);
    }

    #[test]
    fn partition_rejects_out_of_range_labels() {
        assert!(Partition::new(vec![0, 1, 3], 2).is_err());
        let p = Partition::new(vec![0, 1, 2, 2], 2).unwrap();
        assert_eq!(p.n_trimmed(), 1);
        assert_eq!(p.group_sizes(), vec![1, 2]);
    }

    #[test]
    fn dissimilarity_rejects_asymmetry() {
        assert!(Dissimilarity::new(2, vec![0.0, 1.0, 2.0, 0.0], Metric::EuclideanCentroid).is_err());
        assert!(Dissimilarity::new(2, vec![0.0, 1.0, 1.0, 0.0], Metric::EuclideanCentroid).is_ok());
    }

    #[test]
    fn config_validation() {
        let mut cfg = FitConfig { big_k: 3, k: 2, ..FitConfig::default() };
        assert_eq!(cfg.validate(), Err(Error::KGreaterThank { big_k: 3, k: 2 }));
        cfg.k = 6;
        cfg.alpha = 0.6;
        assert_eq!(cfg.validate(), Err(Error::AlphaOutOfRange(0.6)));
        cfg.alpha = 0.1;
        cfg.r = 0.5;
        assert_eq!(cfg.validate(), Err(Error::RestrictionOutOfRange(0.5)));
    }

    proptest::proptest! {
        #[test]
        fn partition_text_round_trip(labels in proptest::collection::vec(0usize..6, 1..80)) {
            let p = Partition::from_labels(labels);
            let back = Partition::parse_text(&p.to_text()).unwrap();
            proptest::prop_assert_eq!(back, p);
        }
    }
}
