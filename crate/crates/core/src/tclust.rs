//! Trimmed Gaussian classification with a joint eigenvalue-ratio
//! restriction (TCLUST).
//!
//! The fitter maximises the trimmed classification log-likelihood
//! `sum_j sum_{i in C_j} log(pi_j phi(x_i; mu_j, Sigma_j))` over the `h =
//! floor(n(1-alpha))` retained points, subject to every eigenvalue of every
//! `Sigma_j` lying in `[m, r m]` for one common scale `m`. Each step:
//!
//! 1. evaluates `log pi_j + log phi_j` for all points and components,
//! 2. keeps the `h` points with the largest best-component score,
//! 3. hard-assigns them to their best component,
//! 4. refits weights, means and sample covariances,
//! 5. truncates all covariance eigenvalues jointly via
//!    [`restrict_eigenvalues`] and recomposes.
//!
//! With `r = 1` every component is the same multiple of the identity, which
//! is the trimmed k-means model up to the mixing weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sq_dist, GaussianLogDensity, SymEigen};
use crate::model::{
    check_alpha, retained_count, tol, validate_data, ClusterModel, CovarianceKind, DataMatrix, Partition,
    TRIMMED,
};
use crate::rng::{derive_seed, kmeanspp_indices, par_map, rng_from_seed};
use crate::trimmed_kmeans::{keep_lowest, ClusterStats, TrimCut};

/// Per-step diagnostics of a TCLUST restart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TclustStep {
    /// Trimmed classification log-likelihood under the parameters the step
    /// started from.
    pub log_objective: f64,
    /// Largest over smallest eigenvalue across all components after the
    /// step's restricted update.
    pub eigen_ratio: f64,
    /// An empty component was re-seeded during this step, so the next
    /// objective is not comparable with this one.
    pub reseeded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TclustFit {
    pub model: ClusterModel,
    pub partition: Partition,
    pub log_objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub restriction: f64,
    /// Restricted eigenvalues of each component, in the order of the
    /// eigenvectors used to build `model.covariances`.
    pub eigenvalues: Vec<Vec<f64>>,
    pub history: Vec<TclustStep>,
    pub restart: usize,
}

impl TclustFit {
    pub fn eigen_ratio(&self) -> f64 {
        eigen_ratio(&self.eigenvalues)
    }
}

fn eigen_ratio(eigs: &[Vec<f64>]) -> f64 {
    let (lo, hi) = eigs
        .iter()
        .flatten()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    hi / lo
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tclust {
    pub k: usize,
    pub alpha: f64,
    pub r: f64,
    pub n_starts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Tclust {
    pub fn new(k: usize, r: f64) -> Self {
        Self { k, alpha: 0.0, r, n_starts: 20, max_iter: 100, tol: 1e-8, seed: 0 }
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

    pub fn fit(&self, data: &DataMatrix) -> Result<TclustFit> {
        validate_data(data)?;
        check_alpha(self.alpha)?;
        if !(self.r >= 1.0) {
            return Err(Error::RestrictionOutOfRange(self.r));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        let h = retained_count(data.n(), self.alpha);
        if self.k > h {
            return Err(Error::KTooLarge { k: self.k, available: h });
        }
        if self.n_starts == 0 || self.max_iter == 0 {
            return Err(Error::InvalidParameter("n_starts and max_iter must be positive".into()));
        }

        let runs = par_map(self.n_starts, |s| self.run(data, h, derive_seed(self.seed, s as u64)));

        let mut best: Option<(usize, Run)> = None;
        let mut first_err = None;
        for (s, run) in runs.into_iter().enumerate() {
            match run {
                Ok(run) => {
                    if best.as_ref().is_none_or(|(_, b)| run.log_objective > b.log_objective) {
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
        let model = ClusterModel {
            centroids: run.components.iter().map(|c| c.mean.clone()).collect(),
            covariances: run.components.iter().map(|c| c.eig.recompose()).collect(),
            sizes: run.sizes,
            weights: run.components.iter().map(|c| c.weight).collect(),
            covariance_kind: CovarianceKind::Restricted,
        };
        Ok(TclustFit {
            model,
            partition: Partition::new(run.labels, self.k).expect("labels are within 0..=k"),
            log_objective: run.log_objective,
            iterations: run.iterations,
            converged: run.converged,
            restriction: self.r,
            eigenvalues: run.components.iter().map(|c| c.eig.values.clone()).collect(),
            history: run.history,
            restart,
        })
    }

    fn run(&self, data: &DataMatrix, h: usize, seed: u64) -> Result<Run> {
        let n = data.n();
        let p = data.p();
        let k = self.k;
        let mut rng = rng_from_seed(seed);
        let centres: Vec<Vec<f64>> =
            kmeanspp_indices(data, k, h, &mut rng).into_iter().map(|i| data.row(i).to_vec()).collect();

        // spherical start scaled by the trimmed spread around the seeds
        let nearest: Vec<f64> = data
            .rows()
            .map(|x| centres.iter().map(|c| sq_dist(x, c)).fold(f64::INFINITY, f64::min))
            .collect();
        let keep = keep_lowest(&nearest, h);
        let spread: f64 = nearest.iter().zip(&keep).filter(|(_, &k)| k).map(|(d, _)| d).sum();
        let s2 = if spread > 0.0 { spread / (h * p) as f64 } else { 1.0 };
        let mut components: Vec<Component> = centres
            .into_iter()
            .map(|mean| Component::new(mean, SymEigen::new(&crate::model::SymMatrix::scaled_identity(p, s2)), 1.0 / k as f64))
            .collect();

        let mut labels = vec![TRIMMED; n];
        let mut history: Vec<TclustStep> = Vec::new();
        let mut sizes = vec![0usize; k];
        let mut converged = false;
        let mut iterations = 0;
        let mut best = vec![(0usize, 0.0f64); n];
        let mut neg = vec![0.0f64; n];
        let mut trim = TrimCut::new();

        while iterations < self.max_iter {
            iterations += 1;
            for (slot, x) in best.iter_mut().zip(data.rows()) {
                *slot = best_component(x, &components);
            }
            for (v, &(_, score)) in neg.iter_mut().zip(&best) {
                *v = -score;
            }
            let (cut, below) = if h < n { trim.find(&neg, h) } else { (f64::INFINITY, n) };
            let mut ties_left = h - below;
            let mut objective = 0.0;
            let mut changed = iterations == 1;
            for ((label, &(j, score)), &v) in labels.iter_mut().zip(&best).zip(&neg) {
                let keep = v < cut || (v == cut && ties_left > 0);
                if v == cut && keep {
                    ties_left -= 1;
                }
                let new = if keep { j + 1 } else { TRIMMED };
                changed |= *label != new;
                *label = new;
                if keep {
                    objective += score;
                }
            }
            if let Some(last) = history.last() {
                if !last.reseeded {
                    debug_assert!(
                        objective >= last.log_objective - tol::MONOTONE * last.log_objective.abs(),
                        "classification likelihood decreased: {} -> {objective}",
                        last.log_objective
                    );
                }
            }
            let improvement = history.last().map(|l| objective - l.log_objective);

            let reseeded = reseed_empty(&mut labels, &best, k)?;
            let (comps, new_sizes) = m_step(data, &labels, k, h, self.r)?;
            components = comps;
            sizes = new_sizes;
            let ratio = eigen_ratio(&components.iter().map(|c| c.eig.values.clone()).collect::<Vec<_>>());
            debug_assert!(ratio <= self.r * (1.0 + tol::RATIO), "eigenvalue ratio {ratio} exceeds {}", self.r);
            history.push(TclustStep { log_objective: objective, eigen_ratio: ratio, reseeded });

            let stable = !changed && !reseeded;
            let small_step = !reseeded && improvement.is_some_and(|d| d.abs() <= self.tol * objective.abs());
            if stable || small_step {
                converged = true;
                break;
            }
        }

        let log_objective: f64 = data
            .rows()
            .zip(&labels)
            .filter(|(_, &l)| l != TRIMMED)
            .map(|(x, &l)| components[l - 1].score(x))
            .sum();
        Ok(Run { labels, components, sizes, log_objective, iterations, converged, history })
    }
}

pub fn fit_tclust(
    data: &DataMatrix,
    k: usize,
    alpha: f64,
    r: f64,
    n_starts: usize,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> Result<TclustFit> {
    Tclust { k, alpha, r, n_starts, max_iter, tol, seed }.fit(data)
}

struct Run {
    labels: Vec<usize>,
    components: Vec<Component>,
    sizes: Vec<usize>,
    log_objective: f64,
    iterations: usize,
    converged: bool,
    history: Vec<TclustStep>,
}

struct Component {
    mean: Vec<f64>,
    eig: SymEigen,
    weight: f64,
    log_weight: f64,
    density: GaussianLogDensity,
}

impl Component {
    fn new(mean: Vec<f64>, eig: SymEigen, weight: f64) -> Self {
        let density = GaussianLogDensity::new(mean.clone(), eig.clone());
        Self { mean, eig, weight, log_weight: weight.ln(), density }
    }

    #[inline]
    fn score(&self, x: &[f64]) -> f64 {
        self.log_weight + self.density.log_density(x)
    }
}

fn best_component(x: &[f64], comps: &[Component]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (j, c) in comps.iter().enumerate() {
        let s = c.score(x);
        if s > best.1 {
            best = (j, s);
        }
    }
    best
}

fn m_step(data: &DataMatrix, labels: &[usize], k: usize, h: usize, r: f64) -> Result<(Vec<Component>, Vec<usize>)> {
    let stats = ClusterStats::compute(data, labels, k);
    let eigs: Vec<SymEigen> = stats
        .covariances
        .iter()
        .map(|c| {
            let mut e = SymEigen::new(c);
            // round-off can push a zero eigenvalue slightly negative
            for v in &mut e.values {
                *v = v.max(0.0);
            }
            e
        })
        .collect();
    let raw: Vec<Vec<f64>> = eigs.iter().map(|e| e.values.clone()).collect();
    let weights: Vec<f64> = stats.sizes.iter().map(|&s| s as f64).collect();
    let restricted = restrict_eigenvalues(&raw, &weights, r).map_err(|e| match e {
        Error::AllZeroEigenvalues => Error::SingularCovariance(0),
        other => other,
    })?;
    let comps = eigs
        .into_iter()
        .zip(restricted)
        .zip(stats.means)
        .zip(&stats.sizes)
        .map(|(((mut eig, values), mean), &size)| {
            eig.values = values;
            Component::new(mean, eig, size as f64 / h as f64)
        })
        .collect();
    Ok((comps, stats.sizes))
}

/// Moves, for every empty component, the worst-scoring retained point of a
/// component with at least two members into it.
fn reseed_empty(labels: &mut [usize], best: &[(usize, f64)], k: usize) -> Result<bool> {
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        if l != TRIMMED {
            sizes[l - 1] += 1;
        }
    }
    let mut reseeded = false;
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let donor = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l != TRIMMED && sizes[l - 1] > 1)
            .min_by(|(a, _), (b, _)| best[*a].1.total_cmp(&best[*b].1).then(a.cmp(b)))
            .map(|(i, _)| i);
        let Some(i) = donor else {
            return Err(Error::DegenerateCluster(empty));
        };
        sizes[labels[i] - 1] -= 1;
        labels[i] = empty + 1;
        sizes[empty] = 1;
        reseeded = true;
    }
    Ok(reseeded)
}

/// Optimal joint truncation of eigenvalues to `[m, r m]`.
///
/// `eigs[j]` holds the eigenvalues of component `j` and `sizes[j]` its
/// weight. The common scale `m` minimises
/// `sum_j sizes[j] sum_l (ln t_jl + d_jl / t_jl)` with
/// `t_jl = clamp(d_jl, m, r m)`. Between consecutive breakpoints
/// (`d_jl` and `d_jl / r`) the clamped sets are fixed and the objective is
/// `A ln m + B / m + const`, minimised at `m = B / A`; every interval is
/// checked and the best candidate kept.
pub fn restrict_eigenvalues(eigs: &[Vec<f64>], sizes: &[f64], r: f64) -> Result<Vec<Vec<f64>>> {
    if !(r >= 1.0) {
        return Err(Error::RestrictionOutOfRange(r));
    }
    if eigs.len() != sizes.len() {
        return Err(Error::LengthMismatch(eigs.len(), sizes.len()));
    }
    if eigs.iter().flatten().chain(sizes).any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidParameter("eigenvalues and sizes must be finite and non-negative".into()));
    }
    let all: Vec<f64> = eigs.iter().flatten().copied().collect();
    if all.iter().all(|&v| v == 0.0) {
        return Err(Error::AllZeroEigenvalues);
    }
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = all.iter().copied().fold(0.0f64, f64::max);
    if lo > 0.0 && hi <= r * lo {
        return Ok(eigs.to_vec());
    }

    // zero total weight: fall back to equal weights so the scale is defined
    let total: f64 = sizes.iter().sum();
    let weighted: Vec<(f64, f64)> = eigs
        .iter()
        .zip(sizes)
        .flat_map(|(e, &w)| e.iter().map(move |&d| (d, if total > 0.0 { w } else { 1.0 })))
        .filter(|&(_, w)| w > 0.0)
        .collect();
    let m = optimal_scale(&weighted, r)?;
    Ok(eigs.iter().map(|e| e.iter().map(|&d| d.clamp(m, r * m)).collect()).collect())
}

/// Minimiser over `m > 0` of the weighted truncation objective.
fn optimal_scale(weighted: &[(f64, f64)], r: f64) -> Result<f64> {
    if weighted.iter().all(|&(d, _)| d == 0.0) {
        return Err(Error::AllZeroEigenvalues);
    }
    let mut cuts: Vec<f64> = weighted.iter().flat_map(|&(d, _)| [d, d / r]).filter(|&v| v > 0.0).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let objective = |m: f64| -> f64 {
        weighted
            .iter()
            .map(|&(d, w)| {
                let t = d.clamp(m, r * m);
                w * (t.ln() + d / t)
            })
            .sum()
    };

    let mut candidates: Vec<f64> = cuts.clone();
    let bounds = std::iter::once(0.0).chain(cuts.iter().copied()).zip(cuts.iter().copied().map(Some).chain([None]));
    for (lo, hi) in bounds {
        let probe = match hi {
            Some(hi) => 0.5 * (lo + hi),
            None => 2.0 * lo,
        };
        let (mut a, mut b) = (0.0, 0.0);
        for &(d, w) in weighted {
            if d < probe {
                a += w;
                b += w * d;
            } else if d > r * probe {
                a += w;
                b += w * d / r;
            }
        }
        if a > 0.0 && b > 0.0 {
            let mut m = b / a;
            if m < lo {
                m = lo;
            }
            if let Some(hi) = hi {
                m = m.min(hi);
            }
            if m > 0.0 {
                candidates.push(m);
            }
        }
    }

    let mut best = (f64::INFINITY, f64::NAN);
    for m in candidates {
        let f = objective(m);
        if f < best.0 || (f == best.0 && m < best.1) {
            best = (f, m);
        }
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_ratio_averages() {
        let out = restrict_eigenvalues(&[vec![4.0, 1.0]], &[1.0], 1.0).unwrap();
        assert_relative_eq!(out[0][0], 2.5, epsilon = 1e-12);
        assert_relative_eq!(out[0][1], 2.5, epsilon = 1e-12);
        let split = restrict_eigenvalues(&[vec![4.0], vec![1.0]], &[3.0, 3.0], 1.0).unwrap();
        assert_relative_eq!(split[0][0], 2.5, epsilon = 1e-12);
    }

    #[test]
    fn feasible_input_is_untouched() {
        let eigs = vec![vec![4.0, 1.0]];
        assert_eq!(restrict_eigenvalues(&eigs, &[1.0], 10.0).unwrap(), eigs);
    }

    #[test]
    fn all_zero_errors() {
        assert_eq!(restrict_eigenvalues(&[vec![0.0, 0.0]], &[2.0], 5.0), Err(Error::AllZeroEigenvalues));
    }

    #[test]
    fn zero_eigenvalue_is_lifted() {
        let out = restrict_eigenvalues(&[vec![2.0, 0.0]], &[5.0], 4.0).unwrap();
        assert!(out[0][1] > 0.0);
        assert!(out[0][0] / out[0][1] <= 4.0 * (1.0 + 1e-12));
    }

    #[test]
    fn single_component_is_sample_mean_and_restricted_covariance() {
        let data = DataMatrix::from_rows(&[
            vec![0.0, 0.0],
            vec![4.0, 0.5],
            vec![1.0, 1.0],
            vec![3.0, -0.5],
            vec![2.0, 0.0],
        ])
        .unwrap();
        let fit = fit_tclust(&data, 1, 0.0, 3.0, 2, 50, 1e-10, 0).unwrap();
        assert_relative_eq!(fit.model.centroids[0][0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(fit.model.centroids[0][1], 0.2, epsilon = 1e-12);
        let stats = ClusterStats::compute(&data, &[1; 5], 1);
        let raw = SymEigen::new(&stats.covariances[0]).values;
        let expected = restrict_eigenvalues(&[raw], &[5.0], 3.0).unwrap();
        let mut got = fit.eigenvalues[0].clone();
        let mut want = expected[0].clone();
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert_relative_eq!(g, w, max_relative = 1e-10);
        }
        assert!(fit.eigen_ratio() <= 3.0 * (1.0 + 1e-8));
    }

    #[test]
    fn rejects_bad_restriction() {
        let data = DataMatrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(fit_tclust(&data, 1, 0.0, 0.5, 1, 10, 1e-8, 0).unwrap_err(), Error::RestrictionOutOfRange(0.5));
    }
}
