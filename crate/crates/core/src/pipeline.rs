//! Two-step robust clustering: a trimmed first-step fit with an inflated
//! number of components, followed by hierarchical merging of those
//! components into the requested number of groups.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::agglomerate::{dissimilarity, merge_components, MergeResult};
use crate::error::{Error, Result};
use crate::model::{ClusterModel, DataMatrix, Dissimilarity, FitConfig, Method, Partition, TRIMMED};
use crate::rng::derive_seed;
use crate::tclust::{TclustFit, Tclust};
use crate::trimmed_kmeans::{TkmFit, TrimmedKMeans};

const DEMP_STREAM: u64 = 0x0DE4_0000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum FirstStep {
    TrimmedKMeans(TkmFit),
    Tclust(TclustFit),
}

impl FirstStep {
    pub fn partition(&self) -> &Partition {
        match self {
            FirstStep::TrimmedKMeans(f) => &f.partition,
            FirstStep::Tclust(f) => &f.partition,
        }
    }

    pub fn model(&self) -> &ClusterModel {
        match self {
            FirstStep::TrimmedKMeans(f) => &f.model,
            FirstStep::Tclust(f) => &f.model,
        }
    }

    pub fn method(&self) -> Method {
        match self {
            FirstStep::TrimmedKMeans(_) => Method::Tkm,
            FirstStep::Tclust(_) => Method::Tc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    /// Labels `0..=K` over the original observations.
    pub final_partition: Partition,
    pub first_step: FirstStep,
    pub dissimilarity: Dissimilarity,
    pub merge: MergeResult,
    pub config_echo: FitConfig,
    /// A TCLUST first step was requested with `r = 1` and trimmed k-means
    /// was used instead.
    pub routed_to_tkmeans: bool,
    pub wall_time_s: f64,
}

/// Relabels first-step component labels through the merge map.
pub fn relabel(first: &Partition, component_to_group: &[usize], big_k: usize) -> Partition {
    let labels = first
        .labels()
        .iter()
        .map(|&l| if l == TRIMMED { TRIMMED } else { component_to_group[l - 1] })
        .collect();
    Partition::new(labels, big_k).expect("groups are within 1..=K")
}

/// tk-merge: trimmed k-means with `cfg.k` components, then merging.
pub fn fit_tk_merge(data: &DataMatrix, cfg: &FitConfig) -> Result<PipelineResult> {
    run(data, cfg, Method::Tkm)
}

/// TC-merge: TCLUST with restriction `cfg.r`, then merging. With `r = 1`
/// the first step is trimmed k-means, exactly as [`fit_tk_merge`].
pub fn fit_tc_merge(data: &DataMatrix, cfg: &FitConfig) -> Result<PipelineResult> {
    run(data, cfg, Method::Tc)
}

pub fn fit(data: &DataMatrix, cfg: &FitConfig, method: Method) -> Result<PipelineResult> {
    run(data, cfg, method)
}

fn run(data: &DataMatrix, cfg: &FitConfig, method: Method) -> Result<PipelineResult> {
    cfg.validate()?;
    let timer = Timer::start();
    let routed_to_tkmeans = method == Method::Tc && cfg.r == 1.0;
    let first_step = if method == Method::Tkm || routed_to_tkmeans {
        FirstStep::TrimmedKMeans(
            TrimmedKMeans {
                k: cfg.k,
                alpha: cfg.alpha,
                n_starts: cfg.n_starts,
                max_iter: cfg.max_iter,
                tol: cfg.tol,
                seed: cfg.seed,
            }
            .fit(data)?,
        )
    } else {
        FirstStep::Tclust(
            Tclust {
                k: cfg.k,
                alpha: cfg.alpha,
                r: cfg.r,
                n_starts: cfg.n_starts,
                max_iter: cfg.max_iter,
                tol: cfg.tol,
                seed: cfg.seed,
            }
            .fit(data)?,
        )
    };
    let d = dissimilarity(first_step.model(), cfg.metric, cfg.n_mc, derive_seed(cfg.seed, DEMP_STREAM))?;
    let merge = merge_components(&d, cfg.linkage, cfg.big_k)?;
    let final_partition = relabel(first_step.partition(), &merge.component_to_group, cfg.big_k);
    Ok(PipelineResult {
        final_partition,
        first_step,
        dissimilarity: d,
        merge,
        config_echo: cfg.clone(),
        routed_to_tkmeans,
        wall_time_s: timer.elapsed_s(),
    })
}

/// Heuristics for the number of first-step components (natural log).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KHeuristic {
    /// `round(2 ln n)`, suited to a trimmed k-means first step.
    TwoLogN,
    /// `round(ln n)`, suited to a TCLUST first step.
    LogN,
    /// `round(2 K ln n)`.
    TwoKLogN,
}

impl KHeuristic {
    /// Number of components for `n` observations and `big_k` groups,
    /// clamped to at least `big_k + 1`.
    pub fn components(self, n: usize, big_k: usize) -> usize {
        let ln = (n as f64).ln();
        let raw = match self {
            KHeuristic::TwoLogN => (2.0 * ln).round(),
            KHeuristic::LogN => ln.round(),
            KHeuristic::TwoKLogN => (2.0 * big_k as f64 * ln).round(),
        };
        (raw.max(0.0) as usize).max(big_k + 1)
    }
}

impl FromStr for KHeuristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "2logn" => Ok(KHeuristic::TwoLogN),
            "logn" => Ok(KHeuristic::LogN),
            "2klogn" => Ok(KHeuristic::TwoKLogN),
            other => Err(Error::InvalidParameter(format!("unknown k heuristic '{other}'"))),
        }
    }
}

impl fmt::Display for KHeuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KHeuristic::TwoLogN => "2logn",
            KHeuristic::LogN => "logn",
            KHeuristic::TwoKLogN => "2Klogn",
        })
    }
}

/// `round(2 ln n)` for trimmed k-means, `round(ln n)` for TCLUST, without
/// clamping.
pub fn default_k(n: usize, method: Method) -> usize {
    let ln = (n as f64).ln();
    match method {
        Method::Tkm => (2.0 * ln).round() as usize,
        Method::Tc => ln.round() as usize,
    }
}

struct Timer {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Timer {
    fn start() -> Self {
        Self {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    // no monotonic clock on wasm32-unknown-unknown; callers time in JS there
    fn elapsed_s(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        {
            self.start.elapsed().as_secs_f64()
        }
        #[cfg(target_arch = "wasm32")]
        {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_k_values() {
        assert_eq!(default_k(5000, Method::Tkm), 17);
        assert_eq!(default_k(5000, Method::Tc), 9);
        assert_eq!(default_k(8, Method::Tkm), 4);
    }

    #[test]
    fn heuristics_clamp_to_more_than_big_k() {
        assert_eq!(KHeuristic::LogN.components(10, 4), 5);
        assert_eq!(KHeuristic::TwoLogN.components(5000, 2), 17);
        assert_eq!(KHeuristic::TwoKLogN.components(2000, 2), 30);
        assert_eq!("2Klogn".parse::<KHeuristic>().unwrap(), KHeuristic::TwoKLogN);
    }

    #[test]
    fn toy_pairs() {
        let data = DataMatrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 1.0], vec![10.0, 10.0], vec![10.0, 11.0]]).unwrap();
        let cfg = FitConfig { big_k: 2, k: 2, ..FitConfig::default() };
        let res = fit_tk_merge(&data, &cfg).unwrap();
        let l = res.final_partition.labels();
        assert_eq!(l[0], l[1]);
        assert_eq!(l[2], l[3]);
        assert_ne!(l[0], l[2]);
    }

    #[test]
    fn rejects_more_groups_than_components() {
        let data = DataMatrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let cfg = FitConfig { big_k: 3, k: 2, ..FitConfig::default() };
        assert_eq!(fit_tk_merge(&data, &cfg).unwrap_err(), Error::KGreaterThank { big_k: 3, k: 2 });
    }

    #[test]
    fn unit_restriction_routes_to_tkmeans() {
        let data = DataMatrix::from_rows(&[vec![0.0], vec![0.5], vec![5.0], vec![5.5], vec![9.0], vec![9.4]]).unwrap();
        let cfg = FitConfig { big_k: 2, k: 3, r: 1.0, ..FitConfig::default() };
        let tc = fit_tc_merge(&data, &cfg).unwrap();
        assert!(tc.routed_to_tkmeans);
        assert_eq!(tc.first_step.method(), Method::Tkm);
        let tk = fit_tk_merge(&data, &cfg).unwrap();
        assert_eq!(tc.final_partition, tk.final_partition);
    }
}
