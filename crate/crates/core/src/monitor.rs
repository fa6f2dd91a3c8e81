//! Data-driven choice of the trimming level.
//!
//! The first-step fitter is run at every level of a descending grid of
//! trimming proportions (40% down to 0% in 5% steps by default) and
//! neighbouring solutions are compared with the ARI, restricted to the
//! observations both levels retain. While trimming still removes only
//! contamination, lowering `alpha` leaves the fitted structure unchanged
//! and the consecutive ARI stays near one. The first level at which the
//! score drops below a threshold is where contaminated points start to
//! distort the fit; the larger `alpha` of that pair is selected. When no
//! drop occurs the smallest `alpha` is selected.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{ari_jointly_retained, ari_labels};
use crate::model::{check_alpha, DataMatrix, Method, Partition};
use crate::rng::par_map;
use crate::tclust::Tclust;
use crate::trimmed_kmeans::TrimmedKMeans;

/// Restriction factor used for TCLUST-based monitoring.
pub const TC_MONITOR_R: f64 = 64.0;

/// Default score below which a consecutive pair counts as a break.
pub const DEFAULT_DROP_THRESHOLD: f64 = 0.9;

/// 0.40, 0.35, ..., 0.00.
pub fn default_grid() -> Vec<f64> {
    (0..=8).rev().map(|i| (5 * i) as f64 / 100.0).collect()
}

/// What each level's partition is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonitorTarget {
    /// The partition at the next (smaller) grid level; selection by the
    /// first drop below the threshold.
    Consecutive,
    /// The partition at the smallest grid level; selection by the maximal
    /// score, ties to the larger `alpha`.
    SmallestAlpha,
    /// Known ground-truth labels (0 = contaminant); selection by the
    /// maximal score, ties to the larger `alpha`.
    GroundTruth,
}

impl FromStr for MonitorTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "consecutive" => Ok(MonitorTarget::Consecutive),
            "smallest" | "smallest_alpha" => Ok(MonitorTarget::SmallestAlpha),
            "truth" | "ground_truth" => Ok(MonitorTarget::GroundTruth),
            other => Err(Error::InvalidParameter(format!("unknown monitoring target '{other}'"))),
        }
    }
}

impl fmt::Display for MonitorTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MonitorTarget::Consecutive => "consecutive",
            MonitorTarget::SmallestAlpha => "smallest_alpha",
            MonitorTarget::GroundTruth => "ground_truth",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorConfig {
    /// Components fitted at every level.
    pub k: usize,
    pub method: Method,
    /// Restriction factor for [`Method::Tc`]; ignored for trimmed k-means.
    pub r: f64,
    pub grid: Vec<f64>,
    pub target: MonitorTarget,
    pub drop_threshold: f64,
    pub n_starts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl MonitorConfig {
    pub fn new(k: usize, method: Method) -> Self {
        Self {
            k,
            method,
            r: TC_MONITOR_R,
            grid: default_grid(),
            target: MonitorTarget::Consecutive,
            drop_threshold: DEFAULT_DROP_THRESHOLD,
            n_starts: 20,
            max_iter: 100,
            tol: 1e-8,
            seed: 0,
        }
    }

    fn r_used(&self) -> f64 {
        match self.method {
            Method::Tkm => 1.0,
            Method::Tc => self.r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorTrace {
    /// Descending trimming levels.
    pub alphas: Vec<f64>,
    /// First-step partition per level, `None` where the fit failed.
    pub partitions: Vec<Option<Partition>>,
    /// Fit error per level, if any.
    pub failures: Vec<Option<String>>,
    /// Target score per adjacent pair `(alphas[t], alphas[t+1])`, restricted
    /// to jointly retained observations. `NaN` where a level failed.
    pub scores: Vec<f64>,
    /// Same pairs, trimmed label counted as a class.
    pub unrestricted_scores: Vec<f64>,
    /// Per-level ARI against ground truth, when truth was supplied.
    pub truth_scores: Option<Vec<f64>>,
    pub best_alpha: f64,
    pub method: Method,
    pub r_used: f64,
    pub target: MonitorTarget,
}

impl MonitorTrace {
    pub fn n_trimmed(&self) -> Vec<Option<usize>> {
        self.partitions.iter().map(|p| p.as_ref().map(Partition::n_trimmed)).collect()
    }

    pub fn best_partition(&self) -> Option<&Partition> {
        let idx = self.alphas.iter().position(|&a| a == self.best_alpha)?;
        self.partitions[idx].as_ref()
    }

    /// `alpha,score_consecutive,score_unrestricted,n_trimmed` with one row per
    /// level; the score columns of the last level are empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,score_consecutive,score_unrestricted,n_trimmed\n");
        let trimmed = self.n_trimmed();
        for (t, &alpha) in self.alphas.iter().enumerate() {
            let cell = |v: Option<&f64>| match v {
                Some(v) if v.is_finite() => format!("{v:.12}"),
                _ => String::new(),
            };
            let n_trim = trimmed[t].map(|n| n.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{alpha:.2},{},{},{n_trim}\n",
                cell(self.scores.get(t)),
                cell(self.unrestricted_scores.get(t))
            ));
        }
        out
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::GridTooShort(grid.len()));
    }
    for &a in grid {
        check_alpha(a).map_err(|_| Error::InvalidGrid)?;
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidGrid);
    }
    Ok(())
}

/// Sweeps the trimming grid and selects a trimming level. `truth` is
/// required for [`MonitorTarget::GroundTruth`] and otherwise only adds
/// diagnostic per-level scores.
pub fn monitor_alpha(data: &DataMatrix, cfg: &MonitorConfig, truth: Option<&Partition>) -> Result<MonitorTrace> {
    check_grid(&cfg.grid)?;
    if let Some(t) = truth {
        if t.len() != data.n() {
            return Err(Error::LengthMismatch(t.len(), data.n()));
        }
    }
    if cfg.target == MonitorTarget::GroundTruth && truth.is_none() {
        return Err(Error::InvalidParameter("ground-truth monitoring needs truth labels".into()));
    }
    let r_used = cfg.r_used();

    // same seed at every level so neighbouring fits differ only through alpha
    let fits: Vec<Result<Partition>> = par_map(cfg.grid.len(), |t| {
        let alpha = cfg.grid[t];
        match cfg.method {
            Method::Tkm => TrimmedKMeans {
                k: cfg.k,
                alpha,
                n_starts: cfg.n_starts,
                max_iter: cfg.max_iter,
                tol: cfg.tol,
                seed: cfg.seed,
            }
            .fit(data)
            .map(|f| f.partition),
            Method::Tc => Tclust {
                k: cfg.k,
                alpha,
                r: r_used,
                n_starts: cfg.n_starts,
                max_iter: cfg.max_iter,
                tol: cfg.tol,
                seed: cfg.seed,
            }
            .fit(data)
            .map(|f| f.partition),
        }
    });
    if fits.iter().all(Result::is_err) {
        return Err(Error::AllLevelsFailed);
    }
    let mut partitions = Vec::with_capacity(fits.len());
    let mut failures = Vec::with_capacity(fits.len());
    for fit in fits {
        match fit {
            Ok(p) => {
                partitions.push(Some(p));
                failures.push(None);
            }
            Err(e) => {
                partitions.push(None);
                failures.push(Some(e.to_string()));
            }
        }
    }

    let last = partitions.len() - 1;
    let pair = |a: usize, b: usize, restricted: bool| -> f64 {
        match (&partitions[a], &partitions[b]) {
            (Some(pa), Some(pb)) => {
                let s = if restricted {
                    ari_jointly_retained(pa.labels(), pb.labels())
                } else {
                    ari_labels(pa.labels(), pb.labels())
                };
                s.unwrap_or(f64::NAN)
            }
            _ => f64::NAN,
        }
    };
    let (scores, unrestricted_scores): (Vec<f64>, Vec<f64>) = (0..last)
        .map(|t| match cfg.target {
            MonitorTarget::SmallestAlpha => (pair(t, last, true), pair(t, last, false)),
            _ => (pair(t, t + 1, true), pair(t, t + 1, false)),
        })
        .unzip();
    let truth_scores = truth.map(|truth| {
        partitions
            .iter()
            .map(|p| p.as_ref().map_or(f64::NAN, |p| ari_labels(p.labels(), truth.labels()).unwrap_or(f64::NAN)))
            .collect::<Vec<f64>>()
    });

    let best_alpha = match cfg.target {
        MonitorTarget::Consecutive => select_first_drop(&cfg.grid, &scores, cfg.drop_threshold, &partitions),
        MonitorTarget::SmallestAlpha => select_max(&cfg.grid[..last], &scores),
        MonitorTarget::GroundTruth => select_max(&cfg.grid, truth_scores.as_deref().expect("checked above")),
    }
    .ok_or(Error::AllLevelsFailed)?;

    Ok(MonitorTrace {
        alphas: cfg.grid.clone(),
        partitions,
        failures,
        scores,
        unrestricted_scores,
        truth_scores,
        best_alpha,
        method: cfg.method,
        r_used,
        target: cfg.target,
    })
}

/// Larger `alpha` of the first pair scoring below `threshold`; the smallest
/// successfully fitted level when there is no such pair.
fn select_first_drop(grid: &[f64], scores: &[f64], threshold: f64, parts: &[Option<Partition>]) -> Option<f64> {
    if let Some(t) = scores.iter().position(|&s| s.is_finite() && s < threshold) {
        return Some(grid[t]);
    }
    grid.iter().zip(parts).rev().find(|(_, p)| p.is_some()).map(|(&a, _)| a)
}

/// Level with the largest finite score, ties to the larger `alpha`.
fn select_max(levels: &[f64], scores: &[f64]) -> Option<f64> {
    let mut best: Option<(f64, f64)> = None;
    for (&a, &s) in levels.iter().zip(scores) {
        if s.is_finite() && best.is_none_or(|(bs, _)| s > bs) {
            best = Some((s, a));
        }
    }
    best.map(|(_, a)| a)
}
