//! Browser bindings: generate a synthetic dataset, fit tk-merge or TC-merge,
//! and sweep trimming levels. Points cross the boundary as flat row-major
//! `Float64Array`s and labels as `Uint32Array`s.

use tkmerge::datagen::{recommended_alpha, scenario, ScenarioId};
use tkmerge::monitor::default_grid;
use tkmerge::{fit, monitor_alpha, DataMatrix, FitConfig, KHeuristic, Method, MonitorConfig};
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub struct Dataset {
    points: Vec<f64>,
    truth: Vec<u32>,
    big_k: usize,
    alpha: f64,
}

#[wasm_bindgen]
impl Dataset {
    pub fn points(&self) -> Vec<f64> {
        self.points.clone()
    }

    pub fn truth(&self) -> Vec<u32> {
        self.truth.clone()
    }

    /// Number of true groups.
    #[wasm_bindgen(getter)]
    pub fn groups(&self) -> usize {
        self.big_k
    }

    /// Suggested trimming level for the generated contamination.
    #[wasm_bindgen(getter)]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

#[wasm_bindgen]
pub struct Trace {
    alphas: Vec<f64>,
    scores: Vec<f64>,
    best_alpha: f64,
    labels: Vec<u32>,
}

#[wasm_bindgen]
impl Trace {
    pub fn alphas(&self) -> Vec<f64> {
        self.alphas.clone()
    }

    /// Stability score of each adjacent pair of levels (`NaN` if a level failed).
    pub fn scores(&self) -> Vec<f64> {
        self.scores.clone()
    }

    /// Labels at the selected level.
    pub fn labels(&self) -> Vec<u32> {
        self.labels.clone()
    }

    #[wasm_bindgen(getter, js_name = bestAlpha)]
    pub fn best_alpha(&self) -> f64 {
        self.best_alpha
    }
}

fn to_u32(labels: &[usize]) -> Vec<u32> {
    labels.iter().map(|&l| l as u32).collect()
}

fn matrix(points: &[f64]) -> Result<DataMatrix, String> {
    if points.len() % 2 != 0 {
        return Err("points must hold x, y pairs".into());
    }
    DataMatrix::new(points.to_vec(), points.len() / 2, 2).map_err(|e| e.to_string())
}

pub fn generate_impl(name: &str, scale: f64, seed: u64) -> Result<Dataset, String> {
    let id: ScenarioId = name.parse().map_err(|e: tkmerge::Error| e.to_string())?;
    let ds = scenario(id, scale, seed).map_err(|e| e.to_string())?;
    let m = ds.n_contaminants();
    let clean = ds.data.n() - m;
    let alpha = if id.is_shape() { recommended_alpha(clean, m) } else { m as f64 / ds.data.n() as f64 };
    Ok(Dataset { points: ds.data.values().to_vec(), truth: to_u32(ds.truth.labels()), big_k: id.big_k(), alpha })
}

/// `k = 0` picks `round(2 K ln n)` components.
#[allow(clippy::too_many_arguments)]
pub fn fit_impl(
    points: &[f64],
    big_k: usize,
    k: usize,
    alpha: f64,
    method: &str,
    r: f64,
    linkage: &str,
    seed: u64,
) -> Result<Vec<u32>, String> {
    let data = matrix(points)?;
    let method: Method = method.parse().map_err(|e: tkmerge::Error| e.to_string())?;
    let k = if k == 0 { KHeuristic::TwoKLogN.components(data.n(), big_k) } else { k };
    let cfg = FitConfig {
        big_k,
        k,
        alpha,
        r: if method == Method::Tkm { 1.0 } else { r },
        linkage: linkage.parse().map_err(|e: tkmerge::Error| e.to_string())?,
        n_starts: 10,
        seed,
        ..FitConfig::default()
    };
    let res = fit(&data, &cfg, method).map_err(|e| e.to_string())?;
    Ok(to_u32(res.final_partition.labels()))
}

pub fn monitor_impl(points: &[f64], k: usize, method: &str, seed: u64) -> Result<Trace, String> {
    let data = matrix(points)?;
    let method: Method = method.parse().map_err(|e: tkmerge::Error| e.to_string())?;
    let cfg = MonitorConfig { n_starts: 10, seed, grid: default_grid(), ..MonitorConfig::new(k, method) };
    let trace = monitor_alpha(&data, &cfg, None).map_err(|e| e.to_string())?;
    let labels = trace.best_partition().map(|p| to_u32(p.labels())).unwrap_or_default();
    Ok(Trace { alphas: trace.alphas, scores: trace.scores, best_alpha: trace.best_alpha, labels })
}

/// Synthetic scenario `s1`, `s2`, `s3a`, `s3b` or `s3c` at size `scale`.
#[wasm_bindgen]
pub fn generate(scenario: &str, scale: f64, seed: u64) -> Result<Dataset, JsError> {
    generate_impl(scenario, scale, seed).map_err(|e| JsError::new(&e))
}

/// Final labels (0 = trimmed) of a two-step fit on 2-D points.
#[allow(clippy::too_many_arguments)]
#[wasm_bindgen(js_name = fitMerge)]
pub fn fit_merge(
    points: &[f64],
    big_k: usize,
    k: usize,
    alpha: f64,
    method: &str,
    r: f64,
    linkage: &str,
    seed: u64,
) -> Result<Vec<u32>, JsError> {
    fit_impl(points, big_k, k, alpha, method, r, linkage, seed).map_err(|e| JsError::new(&e))
}

/// Sweeps the default trimming grid with `k` components.
#[wasm_bindgen]
pub fn monitor(points: &[f64], k: usize, method: &str, seed: u64) -> Result<Trace, JsError> {
    monitor_impl(points, k, method, seed).map_err(|e| JsError::new(&e))
}
