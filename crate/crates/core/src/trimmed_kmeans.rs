//! k-means and trimmed k-means fitted by concentration steps.
//!
//! Each step ranks all observations by their squared distance to the
//! nearest centroid, keeps the `floor(n(1-alpha))` closest, assigns them to
//! that centroid and moves every centroid to the mean of its points. The
//! trimmed sum of squares never increases along the way. Plain k-means is
//! the `alpha = 0` case and goes through the same code.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::sq_dist;
use crate::model::{
    check_alpha, retained_count, tol, validate_data, ClusterModel, CovarianceKind, DataMatrix, Partition,
    SymMatrix, TRIMMED,
};
use crate::rng::{derive_seed, kmeanspp_indices, par_map, rng_from_seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TkmFit {
    /// Covariances are the spherical `SSE_j / (p size_j) I` matrices.
    pub model: ClusterModel,
    /// Maximum-likelihood covariances of each cluster's retained points.
    pub empirical_covariances: Vec<SymMatrix>,
    pub partition: Partition,
    /// Trimmed within-cluster sum of squared Euclidean distances.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every concentration step of the winning restart.
    pub history: Vec<f64>,
    /// Index of the winning restart.
    pub restart: usize,
}

/// Trimmed k-means settings. `alpha = 0` gives ordinary k-means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrimmedKMeans {
    pub k: usize,
    pub alpha: f64,
    pub n_starts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl TrimmedKMeans {
    pub fn new(k: usize) -> Self {
        Self { k, alpha: 0.0, n_starts: 20, max_iter: 100, tol: 1e-8, seed: 0 }
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn n_starts(mut self, n_starts: usize) -> Self {
        self.n_starts = n_starts;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn fit(&self, data: &DataMatrix) -> Result<TkmFit> {
        validate_data(data)?;
        check_alpha(self.alpha)?;
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if self.k > data.n() {
            return Err(Error::KTooLarge { k: self.k, available: data.n() });
        }
        let h = retained_count(data.n(), self.alpha);
        if self.k > h {
            return Err(Error::KTooLarge { k: self.k, available: h });
        }
        if self.n_starts == 0 || self.max_iter == 0 {
            return Err(Error::InvalidParameter("n_starts and max_iter must be positive".into()));
        }

        let runs = par_map(self.n_starts, |s| {
            concentrate(data, self.k, h, self.max_iter, self.tol, derive_seed(self.seed, s as u64))
        });

        let mut best: Option<(usize, Run)> = None;
        let mut first_err = None;
        for (s, run) in runs.into_iter().enumerate() {
            match run {
                Ok(run) => {
                    if best.as_ref().is_none_or(|(_, b)| run.objective < b.objective) {
                        best = Some((s, run));
                    }
                }
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        let Some((restart, run)) = best else {
            return Err(first_err.expect("at least one restart ran"));
        };
        Ok(run.into_fit(data, self.k, restart))
    }
}

/// Ordinary k-means: trimmed k-means without trimming.
pub fn fit_kmeans(
    data: &DataMatrix,
    k: usize,
    n_starts: usize,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> Result<TkmFit> {
    TrimmedKMeans { k, alpha: 0.0, n_starts, max_iter, tol, seed }.fit(data)
}

pub fn fit_tkmeans(
    data: &DataMatrix,
    k: usize,
    alpha: f64,
    n_starts: usize,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> Result<TkmFit> {
    TrimmedKMeans { k, alpha, n_starts, max_iter, tol, seed }.fit(data)
}

struct Run {
    labels: Vec<usize>,
    centroids: Vec<Vec<f64>>,
    objective: f64,
    iterations: usize,
    converged: bool,
    history: Vec<f64>,
}

impl Run {
    fn into_fit(self, data: &DataMatrix, k: usize, restart: usize) -> TkmFit {
        let p = data.p();
        let stats = ClusterStats::compute(data, &self.labels, k);
        let h = stats.sizes.iter().sum::<usize>();
        let covariances = stats
            .sse
            .iter()
            .zip(&stats.sizes)
            .map(|(&sse, &size)| SymMatrix::scaled_identity(p, sse / (p * size) as f64))
            .collect();
        let model = ClusterModel {
            centroids: self.centroids,
            covariances,
            sizes: stats.sizes.clone(),
            weights: stats.sizes.iter().map(|&s| s as f64 / h as f64).collect(),
            covariance_kind: CovarianceKind::ScaledIdentity,
        };
        TkmFit {
            model,
            empirical_covariances: stats.covariances,
            partition: Partition::new(self.labels, k).expect("labels are within 0..=k"),
            objective: self.objective,
            iterations: self.iterations,
            converged: self.converged,
            history: self.history,
            restart,
        }
    }
}

/// Per-cluster means, sizes, SSE and ML covariances for labels in `0..=k`.
pub(crate) struct ClusterStats {
    pub means: Vec<Vec<f64>>,
    pub sizes: Vec<usize>,
    pub sse: Vec<f64>,
    pub covariances: Vec<SymMatrix>,
}

impl ClusterStats {
    pub fn compute(data: &DataMatrix, labels: &[usize], k: usize) -> Self {
        let p = data.p();
        let means = cluster_means(data, labels, k);
        let mut sizes = vec![0usize; k];
        let mut sse = vec![0.0; k];
        let mut covariances = vec![SymMatrix::zeros(p); k];
        let mut diff = vec![0.0; p];
        for (x, &l) in data.rows().zip(labels) {
            if l == TRIMMED {
                continue;
            }
            let j = l - 1;
            sizes[j] += 1;
            for (d, (xi, mi)) in diff.iter_mut().zip(x.iter().zip(&means[j])) {
                *d = xi - mi;
            }
            sse[j] += diff.iter().map(|d| d * d).sum::<f64>();
            let cov = &mut covariances[j];
            for a in 0..p {
                for b in 0..=a {
                    cov.set(a, b, cov.get(a, b) + diff[a] * diff[b]);
                }
            }
        }
        for (cov, &size) in covariances.iter_mut().zip(&sizes) {
            let denom = size.max(1) as f64;
            for a in 0..p {
                for b in 0..=a {
                    let v = cov.get(a, b) / denom;
                    cov.set(a, b, v);
                    cov.set(b, a, v);
                }
            }
        }
        Self { means, sizes, sse, covariances }
    }
}

/// Means of the retained points of each cluster. Empty clusters get an
/// empty vector.
pub(crate) fn cluster_means(data: &DataMatrix, labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let p = data.p();
    let mut sums = vec![vec![0.0; p]; k];
    let mut counts = vec![0usize; k];
    for (x, &l) in data.rows().zip(labels) {
        if l != TRIMMED {
            counts[l - 1] += 1;
            for (s, v) in sums[l - 1].iter_mut().zip(x) {
                *s += v;
            }
        }
    }
    sums.into_iter()
        .zip(counts)
        .map(|(s, c)| if c == 0 { Vec::new() } else { s.into_iter().map(|v| v / c as f64).collect() })
        .collect()
}

/// Ranks `scores` ascending with index tie-breaking and returns a mask of
/// the `h` best entries.
pub(crate) fn keep_lowest(scores: &[f64], h: usize) -> Vec<bool> {
    let n = scores.len();
    if h >= n {
        return vec![true; n];
    }
    let mut keep = vec![false; n];
    if h == 0 {
        return keep;
    }
    let mut buf = scores.to_vec();
    let (_, &mut cut, _) = buf.select_nth_unstable_by(h - 1, f64::total_cmp);
    let below = scores.iter().filter(|&&v| v.total_cmp(&cut).is_lt()).count();
    let mut ties_left = h - below;
    for (k, &v) in keep.iter_mut().zip(scores) {
        match v.total_cmp(&cut) {
            std::cmp::Ordering::Less => *k = true,
            std::cmp::Ordering::Equal if ties_left > 0 => {
                *k = true;
                ties_left -= 1;
            }
            _ => {}
        }
    }
    keep
}

/// Finds the `h`-th smallest of a sequence of non-NaN score vectors that
/// change little between calls. The previous cut brackets a
/// window, and only window members are selected; the window widens
/// whenever it misses and narrows when it hits.
#[derive(Debug)]
pub(crate) struct TrimCut {
    cut: Option<f64>,
    width: f64,
    window: Vec<f64>,
}

impl TrimCut {
    pub(crate) fn new() -> Self {
        Self { cut: None, width: 0.05, window: Vec::new() }
    }

    /// Returns `(cut, below)`: the `h`-th smallest value (`1 <= h < len`)
    /// and the number of scores strictly below it. Keeping every score
    /// below the cut plus the first `h - below` scores equal to it, in
    /// index order, reproduces [`keep_lowest`].
    pub(crate) fn find(&mut self, scores: &[f64], h: usize) -> (f64, usize) {
        debug_assert!(h >= 1 && h < scores.len());
        if let Some(c) = self.cut.filter(|&c| c != 0.0 && c.is_finite()) {
            let (lo, hi) = (c - self.width * c.abs(), c + self.width * c.abs());
            self.window.clear();
            let mut below_lo = 0;
            for &v in scores {
                if v < lo {
                    below_lo += 1;
                } else if v <= hi {
                    self.window.push(v);
                }
            }
            if below_lo < h && h <= below_lo + self.window.len() {
                let (_, &mut cut, _) = self.window.select_nth_unstable_by(h - 1 - below_lo, f64::total_cmp);
                let below = below_lo + self.window.iter().filter(|&&v| v < cut).count();
                self.cut = Some(cut);
                self.width = (self.width * 0.5).max(1e-4);
                return (cut, below);
            }
            self.width = (self.width * 4.0).min(1.0);
        }
        self.window.clear();
        self.window.extend_from_slice(scores);
        let (_, &mut cut, _) = self.window.select_nth_unstable_by(h - 1, f64::total_cmp);
        let below = scores.iter().filter(|&&v| v < cut).count();
        self.cut = Some(cut);
        (cut, below)
    }
}

/// Nearest centre among `flat` (row-major, `p` values per centre, ties to
/// the lower index) with its squared distance, plus the smallest squared
/// distance to any other centre.
#[inline]
fn nearest_two(x: &[f64], flat: &[f64]) -> (usize, f64, f64) {
    let (mut j_best, mut best, mut second) = (0, f64::INFINITY, f64::INFINITY);
    let mut visit = |j: usize, d: f64| {
        if d < best {
            second = best;
            best = d;
            j_best = j;
        } else if d < second {
            second = d;
        }
    };
    if let [x0, x1] = *x {
        for (j, c) in flat.chunks_exact(2).enumerate() {
            let (a, b) = (x0 - c[0], x1 - c[1]);
            visit(j, a * a + b * b);
        }
    } else {
        for (j, c) in flat.chunks_exact(x.len()).enumerate() {
            visit(j, sq_dist(x, c));
        }
    }
    (j_best, best, second)
}

/// Nearest-centre search with a lower bound on the distance to every other
/// centre; a point whose bound clears its current centre keeps it without a
/// full scan. The bound is shrunk by the largest centre shift each
/// iteration and deflated slightly against rounding.
struct BoundedAssign {
    lower: Vec<f64>,
    previous: Vec<f64>,
}

impl BoundedAssign {
    fn new(n: usize) -> Self {
        Self { lower: vec![0.0; n], previous: Vec::new() }
    }

    fn assign(&mut self, data: &DataMatrix, flat: &[f64], near: &mut [(usize, f64)], dists: &mut [f64]) {
        let p = data.p();
        let shift = if self.previous.len() == flat.len() {
            self.previous
                .chunks_exact(p)
                .zip(flat.chunks_exact(p))
                .map(|(a, b)| sq_dist(a, b).sqrt())
                .fold(0.0f64, f64::max)
        } else {
            f64::INFINITY
        };
        for (i, x) in data.rows().enumerate() {
            let lower = ((self.lower[i] - shift) * (1.0 - 1e-9)).max(0.0);
            let j = near[i].0;
            if lower > 0.0 {
                let c = &flat[j * p..(j + 1) * p];
                let d = if let ([x0, x1], [c0, c1]) = (x, c) {
                    (x0 - c0) * (x0 - c0) + (x1 - c1) * (x1 - c1)
                } else {
                    sq_dist(x, c)
                };
                if d < lower * lower {
                    near[i].1 = d;
                    dists[i] = d;
                    self.lower[i] = lower;
                    continue;
                }
            }
            let (j, d, second) = nearest_two(x, flat);
            near[i] = (j, d);
            dists[i] = d;
            self.lower[i] = second.sqrt();
        }
        self.previous.clear();
        self.previous.extend_from_slice(flat);
    }
}

fn concentrate(data: &DataMatrix, k: usize, h: usize, max_iter: usize, tol_rel: f64, seed: u64) -> Result<Run> {
    let n = data.n();
    let mut rng = rng_from_seed(seed);
    let mut centroids: Vec<Vec<f64>> =
        kmeanspp_indices(data, k, h, &mut rng).into_iter().map(|i| data.row(i).to_vec()).collect();

    let p = data.p();
    let mut history: Vec<f64> = Vec::new();
    let mut labels = vec![TRIMMED; n];
    let mut converged = false;
    let mut iterations = 0;
    let mut near = vec![(0usize, 0.0f64); n];
    let mut dists = vec![0.0; n];
    let mut sums = vec![0.0; k * p];
    let mut counts = vec![0usize; k];
    let mut bounds = BoundedAssign::new(n);
    let mut trim = TrimCut::new();

    while iterations < max_iter {
        iterations += 1;
        let flat: Vec<f64> = centroids.concat();
        bounds.assign(data, &flat, &mut near, &mut dists);
        let (cut, below) = if h < n { trim.find(&dists, h) } else { (f64::INFINITY, n) };
        let mut ties_left = h - below;
        let mut objective = 0.0;
        let mut changed = iterations == 1;
        sums.iter_mut().for_each(|v| *v = 0.0);
        counts.iter_mut().for_each(|c| *c = 0);
        for (i, x) in data.rows().enumerate() {
            let d = near[i].1;
            let keep = d < cut || (d == cut && ties_left > 0);
            if d == cut && keep {
                ties_left -= 1;
            }
            let label = if keep { near[i].0 + 1 } else { TRIMMED };
            changed |= labels[i] != label;
            labels[i] = label;
            if label != TRIMMED {
                let j = label - 1;
                objective += d;
                counts[j] += 1;
                if let [x0, x1] = *x {
                    sums[2 * j] += x0;
                    sums[2 * j + 1] += x1;
                } else {
                    for (s, v) in sums[j * p..(j + 1) * p].iter_mut().zip(x) {
                        *s += v;
                    }
                }
            }
        }
        if let Some(&last) = history.last() {
            debug_assert!(
                objective <= last + tol::MONOTONE * last.abs().max(f64::MIN_POSITIVE),
                "trimmed SSE increased: {last} -> {objective}"
            );
        }
        let improvement = history.last().map(|&last: &f64| last - objective);
        history.push(objective);

        if counts.contains(&0) {
            reseed_empty(&mut labels, &near, k)?;
            centroids = cluster_means(data, &labels, k);
            changed = true;
        } else {
            for (j, c) in centroids.iter_mut().enumerate() {
                let inv = 1.0 / counts[j] as f64;
                for (cv, s) in c.iter_mut().zip(&sums[j * p..(j + 1) * p]) {
                    *cv = s * inv;
                }
            }
        }

        let small_step = improvement.is_some_and(|d| d <= tol_rel * objective.abs());
        if !changed || small_step || objective == 0.0 {
            converged = true;
            break;
        }
    }

    let objective: f64 = data
        .rows()
        .zip(&labels)
        .filter(|(_, &l)| l != TRIMMED)
        .map(|(x, &l)| sq_dist(x, &centroids[l - 1]))
        .sum();
    if let Some(&last) = history.last() {
        debug_assert!(objective <= last + tol::MONOTONE * last.abs().max(f64::MIN_POSITIVE));
        if objective != last {
            history.push(objective);
        }
    }
    Ok(Run { labels, centroids, objective, iterations, converged, history })
}

/// Moves, for every empty cluster, the retained point farthest from its
/// centroid (taken from a cluster with at least two members) into it.
fn reseed_empty(labels: &mut [usize], near: &[(usize, f64)], k: usize) -> Result<()> {
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        if l != TRIMMED {
            sizes[l - 1] += 1;
        }
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let donor = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l != TRIMMED && sizes[l - 1] > 1)
            .max_by(|(a, _), (b, _)| near[*a].1.total_cmp(&near[*b].1).then(b.cmp(a)))
            .map(|(i, _)| i);
        let Some(i) = donor else {
            return Err(Error::DegenerateCluster(empty));
        };
        sizes[labels[i] - 1] -= 1;
        labels[i] = empty + 1;
        sizes[empty] = 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pts(rows: &[&[f64]]) -> DataMatrix {
        DataMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn sorted_centroids(fit: &TkmFit) -> Vec<Vec<f64>> {
        let mut c = fit.model.centroids.clone();
        c.sort_by(|a, b| a[0].total_cmp(&b[0]));
        c
    }

    #[test]
    fn separated_pairs() {
        let data = pts(&[&[0.0, 0.0], &[0.0, 1.0], &[10.0, 10.0], &[10.0, 11.0]]);
        let fit = fit_kmeans(&data, 2, 20, 100, 1e-8, 1).unwrap();
        assert_eq!(sorted_centroids(&fit), vec![vec![0.0, 0.5], vec![10.0, 10.5]]);
        assert_relative_eq!(fit.objective, 1.0, epsilon = 1e-12);
        assert_eq!(fit.partition.n_trimmed(), 0);
        assert!(fit.converged);
    }

    #[test]
    fn repeated_point() {
        let data = pts(&[&[3.0, -1.0][..]; 5]);
        let fit = fit_kmeans(&data, 1, 5, 100, 1e-8, 0).unwrap();
        assert_eq!(fit.model.centroids, vec![vec![3.0, -1.0]]);
        assert_eq!(fit.objective, 0.0);
    }

    #[test]
    fn repeated_point_more_clusters_than_distinct_values() {
        let data = pts(&[&[1.0][..]; 5]);
        let fit = fit_kmeans(&data, 2, 3, 100, 1e-8, 0).unwrap();
        assert_eq!(fit.model.sizes.iter().sum::<usize>(), 5);
        assert!(fit.model.sizes.iter().all(|&s| s > 0));
    }

    #[test]
    fn outlier_is_trimmed() {
        let data = pts(&[&[0.0, 0.0], &[0.0, 1.0], &[10.0, 10.0], &[10.0, 11.0], &[100.0, 100.0]]);
        let fit = fit_tkmeans(&data, 2, 0.2, 20, 100, 1e-8, 3).unwrap();
        assert_eq!(fit.partition.labels()[4], TRIMMED);
        assert_eq!(fit.partition.n_trimmed(), 1);
        assert_eq!(sorted_centroids(&fit), vec![vec![0.0, 0.5], vec![10.0, 10.5]]);
    }

    #[test]
    fn outlier_position_does_not_matter() {
        let near = pts(&[&[0.0, 0.0], &[0.0, 1.0], &[10.0, 10.0], &[10.0, 11.0], &[100.0, 100.0]]);
        let far = pts(&[&[0.0, 0.0], &[0.0, 1.0], &[10.0, 10.0], &[10.0, 11.0], &[1e6, 1e6]]);
        let a = fit_tkmeans(&near, 2, 0.2, 20, 100, 1e-8, 9).unwrap();
        let b = fit_tkmeans(&far, 2, 0.2, 20, 100, 1e-8, 9).unwrap();
        for (ca, cb) in sorted_centroids(&a).iter().zip(sorted_centroids(&b).iter()) {
            for (x, y) in ca.iter().zip(cb) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn alpha_zero_equals_kmeans() {
        let data = pts(&[&[0.0], &[0.3], &[1.0], &[5.0], &[5.2], &[9.0], &[9.1], &[9.7]]);
        let a = fit_kmeans(&data, 3, 10, 100, 1e-8, 42).unwrap();
        let b = fit_tkmeans(&data, 3, 0.0, 10, 100, 1e-8, 42).unwrap();
        assert_eq!(a.partition, b.partition);
    }

    #[test]
    fn errors() {
        let data = pts(&[&[0.0], &[1.0], &[2.0]]);
        assert_eq!(fit_kmeans(&data, 4, 1, 10, 1e-8, 0).unwrap_err(), Error::KTooLarge { k: 4, available: 3 });
        assert_eq!(fit_tkmeans(&data, 1, 0.7, 1, 10, 1e-8, 0).unwrap_err(), Error::AlphaOutOfRange(0.7));
        assert_eq!(fit_tkmeans(&data, 3, 0.4, 1, 10, 1e-8, 0).unwrap_err(), Error::KTooLarge { k: 3, available: 1 });
    }

    #[test]
    fn keep_lowest_breaks_ties_by_index() {
        let keep = keep_lowest(&[1.0, 0.5, 1.0, 1.0, 0.1], 3);
        assert_eq!(keep, vec![true, true, false, false, true]);
    }
}
