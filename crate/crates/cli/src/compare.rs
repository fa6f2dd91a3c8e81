//! The three methods compared by `simulate` and `bench`.

use std::fmt;
use std::time::Instant;

use tkmerge::datagen::{recommended_alpha, ScenarioId, SyntheticDataset};
use tkmerge::{fit_tclust, fit_tk_merge, fit_tkmeans, FitConfig, KHeuristic, Linkage, Metric, Partition};

use crate::config::{RunConfig, TCLUST_R};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contender {
    TkMerge,
    TkMeans,
    Tclust,
}

impl Contender {
    pub const ALL: [Contender; 3] = [Contender::TkMerge, Contender::TkMeans, Contender::Tclust];
}

impl fmt::Display for Contender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Contender::TkMerge => "tk-merge",
            Contender::TkMeans => "tk-means",
            Contender::Tclust => "tclust",
        })
    }
}

/// Fitting settings shared by all contenders on one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub k: Option<usize>,
    pub alpha: Option<f64>,
    pub r: f64,
    pub linkage: Linkage,
    pub metric: Metric,
    pub n_starts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub n_mc: usize,
}

impl Settings {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        Ok(Self {
            k: cfg.k,
            alpha: cfg.alpha,
            r: cfg.r.unwrap_or(TCLUST_R),
            linkage: cfg.linkage()?,
            metric: cfg.metric()?,
            n_starts: cfg.n_starts(),
            max_iter: cfg.max_iter(),
            tol: cfg.tol(),
            n_mc: cfg.n_mc(),
        })
    }

    /// Gaussian scenarios use `k = 2K`; shape scenarios `round(2K ln n)`.
    pub fn k_for(&self, id: ScenarioId, n: usize) -> usize {
        self.k.unwrap_or_else(|| {
            if id.is_shape() {
                KHeuristic::TwoKLogN.components(n, id.big_k())
            } else {
                2 * id.big_k()
            }
        })
    }

    /// The known contamination share for Gaussian scenarios, slightly less
    /// for shapes, whose noise overlaps the clusters.
    pub fn alpha_for(&self, id: ScenarioId, ds: &SyntheticDataset) -> f64 {
        self.alpha.unwrap_or_else(|| {
            let m = ds.n_contaminants();
            let n = ds.data.n() - m;
            if id.is_shape() {
                recommended_alpha(n, m)
            } else {
                m as f64 / (n + m) as f64
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub partition: Partition,
    pub wall_s: f64,
}

pub fn run(c: Contender, id: ScenarioId, ds: &SyntheticDataset, s: &Settings, seed: u64) -> Result<Outcome> {
    let big_k = id.big_k();
    let alpha = s.alpha_for(id, ds);
    let start = Instant::now();
    let partition = match c {
        Contender::TkMerge => {
            let cfg = FitConfig {
                big_k,
                k: s.k_for(id, ds.data.n()),
                alpha,
                r: 1.0,
                metric: s.metric,
                linkage: s.linkage,
                n_starts: s.n_starts,
                max_iter: s.max_iter,
                tol: s.tol,
                seed,
                n_mc: s.n_mc,
            };
            fit_tk_merge(&ds.data, &cfg)?.final_partition
        }
        Contender::TkMeans => fit_tkmeans(&ds.data, big_k, alpha, s.n_starts, s.max_iter, s.tol, seed)?.partition,
        Contender::Tclust => fit_tclust(&ds.data, big_k, alpha, s.r, s.n_starts, s.max_iter, s.tol, seed)?.partition,
    };
    Ok(Outcome { partition, wall_s: start.elapsed().as_secs_f64() })
}
