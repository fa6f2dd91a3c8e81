//! Run configuration: an optional JSON file overlaid by command-line flags.
//!
//! Every output directory receives the fully resolved configuration as
//! `config_echo.json`, which can be passed back with `--config` to repeat
//! the run.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tkmerge::datagen::ScenarioId;
use tkmerge::monitor::DEFAULT_DROP_THRESHOLD;
use tkmerge::{KHeuristic, Linkage, Method, Metric, MonitorTarget};

use crate::error::{CliError, Result};

/// Restriction factor for TC-merge fits and monitoring.
pub const TC_MERGE_R: f64 = 64.0;
/// Restriction factor for the standalone TCLUST comparator.
pub const TCLUST_R: f64 = 1000.0;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub method: Option<String>,
    #[serde(rename = "K")]
    pub big_k: Option<usize>,
    pub k: Option<usize>,
    pub k_heuristic: Option<String>,
    pub alpha: Option<f64>,
    pub r: Option<f64>,
    pub linkage: Option<String>,
    pub metric: Option<String>,
    pub grid: Option<Vec<f64>>,
    pub target: Option<String>,
    pub drop_threshold: Option<f64>,
    pub seed: Option<u64>,
    pub n_starts: Option<usize>,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
    pub n_mc: Option<usize>,
    pub scenario: Option<String>,
    pub scale: Option<f64>,
    pub level: Option<usize>,
    pub reps: Option<usize>,
    pub sizes: Option<Vec<usize>>,
    pub jobs: Option<usize>,
    pub svg: Option<bool>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: RunConfig) -> Self {
        overlay!(
            self, top, command, input, out, truth, method, big_k, k, k_heuristic, alpha, r, linkage, metric, grid,
            target, drop_threshold, seed, n_starts, max_iter, tol, n_mc, scenario, scale, level, reps, sizes, jobs, svg
        );
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serialises");
        s.push('\n');
        s
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("tkmerge-out"))
    }

    pub fn method(&self) -> Result<Method> {
        parse_opt(&self.method, "method").map(|m| m.unwrap_or(Method::Tkm))
    }

    pub fn linkage(&self) -> Result<Linkage> {
        parse_opt(&self.linkage, "linkage").map(|l| l.unwrap_or(Linkage::Single))
    }

    pub fn metric(&self) -> Result<Metric> {
        parse_opt(&self.metric, "metric").map(|m| m.unwrap_or(Metric::EuclideanCentroid))
    }

    pub fn target(&self) -> Result<MonitorTarget> {
        parse_opt(&self.target, "target").map(|t| t.unwrap_or(MonitorTarget::Consecutive))
    }

    pub fn k_heuristic(&self) -> Result<Option<KHeuristic>> {
        parse_opt(&self.k_heuristic, "k heuristic")
    }

    pub fn scenario(&self) -> Result<ScenarioId> {
        parse_opt(&self.scenario, "scenario").map(|s| s.unwrap_or(ScenarioId::S1))
    }

    pub fn big_k(&self) -> Result<usize> {
        self.big_k.ok_or_else(|| CliError::config("--K is required"))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn n_starts(&self) -> usize {
        self.n_starts.unwrap_or(20)
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter.unwrap_or(100)
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(1e-8)
    }

    pub fn n_mc(&self) -> usize {
        self.n_mc.unwrap_or(10_000)
    }

    pub fn drop_threshold(&self) -> f64 {
        self.drop_threshold.unwrap_or(DEFAULT_DROP_THRESHOLD)
    }

    pub fn jobs(&self) -> usize {
        self.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    /// The input file, required by commands that read data.
    pub fn input(&self) -> Result<&Path> {
        self.input.as_deref().ok_or_else(|| CliError::config("an input file is required"))
    }

    /// Number of first-step components: explicit `k`, or the named
    /// heuristic. There is no silent default between the heuristics.
    pub fn resolve_k(&self, n: usize, big_k: usize) -> Result<usize> {
        match (self.k, self.k_heuristic()?) {
            (Some(_), Some(_)) => Err(CliError::config("give either --k or --k-heuristic, not both")),
            (Some(k), None) => Ok(k),
            (None, Some(h)) => Ok(h.components(n, big_k)),
            (None, None) => Err(CliError::config("--k or --k-heuristic is required")),
        }
    }
}

fn parse_opt<T: FromStr<Err = tkmerge::Error>>(v: &Option<String>, what: &str) -> Result<Option<T>> {
    v.as_deref().map(|s| s.parse::<T>().map_err(|e| CliError::config(format!("{what}: {e}")))).transpose()
}
