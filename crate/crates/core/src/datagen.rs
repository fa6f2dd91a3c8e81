//! Seeded synthetic data: Gaussian mixtures with controlled separation,
//! uniform contamination and curve-shaped clusters.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DataMatrix, Partition, TRIMMED};
use crate::rng::{derive_seed, rng_from_seed, StdRng};

/// Rejection attempts when placing cluster means.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 1000;

/// Smallest distance allowed between two sampled means in `[0, 10]^p`.
pub const MIN_MEAN_DISTANCE: f64 = 3.0;

/// Default inflation of the bounding box used for contamination.
pub const DEFAULT_EXPANSION: f64 = 1.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticDataset {
    pub data: DataMatrix,
    /// `0` marks contaminating points.
    pub truth: Partition,
    pub scenario_tag: String,
    pub params_echo: BTreeMap<String, String>,
    /// Generating Gaussian components, when the dataset is a mixture.
    #[serde(default)]
    pub components: Vec<GaussianComponent>,
}

/// `N(mean, R diag(eigenvalues) R^T)` with `rotation` holding the columns
/// of `R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub mean: Vec<f64>,
    pub rotation: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
}

impl GaussianComponent {
    pub fn mahalanobis(&self, x: &[f64]) -> f64 {
        self.rotation
            .iter()
            .zip(&self.eigenvalues)
            .map(|(axis, lam)| {
                let proj: f64 = x.iter().zip(&self.mean).zip(axis).map(|((xi, mi), a)| (xi - mi) * a).sum();
                proj * proj / lam
            })
            .sum::<f64>()
            .sqrt()
    }
}

impl SyntheticDataset {
    pub fn n_contaminants(&self) -> usize {
        self.truth.n_trimmed()
    }

    /// Number of groups in the truth.
    pub fn k_groups(&self) -> usize {
        self.truth.k_groups()
    }

    fn echo(&mut self, key: &str, value: impl ToString) {
        self.params_echo.insert(key.to_string(), value.to_string());
    }
}

fn gaussian(rng: &mut StdRng) -> f64 {
    StandardNormal.sample(rng)
}

fn random_rotation(p: usize, rng: &mut StdRng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(p, p, |_, _| gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // sign fix makes the rotation Haar distributed
    for j in 0..p {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn place_means(k: usize, p: usize, rng: &mut StdRng, separation: f64) -> Result<Vec<Vec<f64>>> {
    for _ in 0..MAX_PLACEMENT_ATTEMPTS {
        let means: Vec<Vec<f64>> = (0..k).map(|_| (0..p).map(|_| rng.random_range(0.0..10.0)).collect()).collect();
        let ok = (0..k).all(|i| (0..i).all(|j| crate::linalg::sq_dist(&means[i], &means[j]).sqrt() >= MIN_MEAN_DISTANCE));
        if ok {
            return Ok(means);
        }
    }
    Err(Error::SeparationInfeasible(separation, MAX_PLACEMENT_ATTEMPTS))
}

/// Gaussian mixture with `big_k` components and `n_per_cluster` points each.
///
/// Means are uniform in `[0, 10]^p`. Each covariance is a random rotation of
/// a diagonal matrix with eigenvalues uniform in `[1, heterogeneity]`. All
/// covariances are then scaled by a common factor so that the closest pair
/// (in units of the summed largest standard deviations) sits exactly at
/// `separation`; every pair satisfies
/// `|mu_i - mu_j| >= separation * (sd_i + sd_j)`.
pub fn gen_gaussian_mixture(
    big_k: usize,
    n_per_cluster: usize,
    p: usize,
    separation: f64,
    heterogeneity: f64,
    seed: u64,
) -> Result<SyntheticDataset> {
    gen_gaussian_mixture_sizes(&vec![n_per_cluster; big_k], p, separation, heterogeneity, seed)
}

/// `n` split into `k` near-equal parts, larger parts first.
pub fn split_evenly(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|j| n / k + usize::from(j < n % k)).collect()
}

/// As [`gen_gaussian_mixture`] with an explicit size per component.
pub fn gen_gaussian_mixture_sizes(
    sizes: &[usize],
    p: usize,
    separation: f64,
    heterogeneity: f64,
    seed: u64,
) -> Result<SyntheticDataset> {
    let big_k = sizes.len();
    if big_k == 0 || p == 0 || sizes.contains(&0) {
        return Err(Error::InvalidParameter("K, p and every cluster size must be positive".into()));
    }
    if !(separation > 0.0 && separation.is_finite()) {
        return Err(Error::InvalidParameter(format!("separation must be positive, got {separation}")));
    }
    if !(heterogeneity >= 1.0 && heterogeneity.is_finite()) {
        return Err(Error::InvalidParameter(format!("heterogeneity must be >= 1, got {heterogeneity}")));
    }
    let mut rng = rng_from_seed(seed);
    let means = place_means(big_k, p, &mut rng, separation)?;
    let shapes: Vec<(DMatrix<f64>, Vec<f64>)> = (0..big_k)
        .map(|_| {
            let rot = random_rotation(p, &mut rng);
            let eig: Vec<f64> = (0..p)
                .map(|_| if heterogeneity > 1.0 { rng.random_range(1.0..heterogeneity) } else { 1.0 })
                .collect();
            (rot, eig)
        })
        .collect();
    let sd: Vec<f64> = shapes.iter().map(|(_, e)| e.iter().cloned().fold(0.0, f64::max).sqrt()).collect();
    let mut scale = 1.0;
    if big_k > 1 {
        scale = f64::INFINITY;
        for i in 0..big_k {
            for j in 0..i {
                let dist = crate::linalg::sq_dist(&means[i], &means[j]).sqrt();
                scale = scale.min(dist / (separation * (sd[i] + sd[j])));
            }
        }
    }

    let n: usize = sizes.iter().sum();
    let mut values = Vec::with_capacity(n * p);
    let mut labels = Vec::with_capacity(n);
    let mut z = vec![0.0; p];
    for (j, (mean, (rot, eig))) in means.iter().zip(&shapes).enumerate() {
        for _ in 0..sizes[j] {
            for (zl, lam) in z.iter_mut().zip(eig) {
                *zl = gaussian(&mut rng) * lam.sqrt() * scale;
            }
            for (a, m) in mean.iter().enumerate() {
                let v: f64 = (0..p).map(|l| rot[(a, l)] * z[l]).sum();
                values.push(m + v);
            }
            labels.push(j + 1);
        }
    }
    let mut ds = SyntheticDataset {
        data: DataMatrix::new(values, n, p)?,
        truth: Partition::new(labels, big_k)?,
        scenario_tag: "gaussian_mixture".into(),
        params_echo: BTreeMap::new(),
        components: means
            .iter()
            .zip(&shapes)
            .map(|(mean, (rot, eig))| GaussianComponent {
                mean: mean.clone(),
                rotation: (0..p).map(|l| rot.column(l).iter().copied().collect()).collect(),
                eigenvalues: eig.iter().map(|lam| lam * scale * scale).collect(),
            })
            .collect(),
    };
    ds.echo("K", big_k);
    ds.echo("sizes", sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(" "));
    ds.echo("p", p);
    ds.echo("separation", separation);
    ds.echo("heterogeneity", heterogeneity);
    ds.echo("seed", seed);
    Ok(ds)
}

/// Appends `round(rate * n)` points uniform on the bounding box of the data,
/// widened by the factor `expansion` about its centre. Appended points are
/// labelled `0`.
pub fn add_uniform_contamination(ds: SyntheticDataset, rate: f64, expansion: f64, seed: u64) -> Result<SyntheticDataset> {
    contaminate(ds, rate, expansion, None, seed)
}

/// As [`add_uniform_contamination`], but candidate points within Mahalanobis
/// distance `min_mahalanobis` of any generating component are rejected, so
/// the noise does not overlap the clusters' cores. Datasets without stored
/// components behave as in [`add_uniform_contamination`].
pub fn add_outlying_contamination(
    ds: SyntheticDataset,
    rate: f64,
    expansion: f64,
    min_mahalanobis: f64,
    seed: u64,
) -> Result<SyntheticDataset> {
    if !(min_mahalanobis >= 0.0 && min_mahalanobis.is_finite()) {
        return Err(Error::InvalidParameter(format!("min_mahalanobis must be non-negative, got {min_mahalanobis}")));
    }
    contaminate(ds, rate, expansion, Some(min_mahalanobis), seed)
}

fn contaminate(
    ds: SyntheticDataset,
    rate: f64,
    expansion: f64,
    min_mahalanobis: Option<f64>,
    seed: u64,
) -> Result<SyntheticDataset> {
    if !(0.0..=0.5).contains(&rate) {
        return Err(Error::InvalidParameter(format!("contamination rate {rate} is outside [0, 0.5]")));
    }
    if !(expansion > 0.0 && expansion.is_finite()) {
        return Err(Error::InvalidParameter(format!("expansion must be positive, got {expansion}")));
    }
    let n = ds.data.n();
    let p = ds.data.p();
    let m = (rate * n as f64).round() as usize;
    if m == 0 {
        return Ok(ds);
    }
    let bounds: Vec<(f64, f64)> = (0..p)
        .map(|j| {
            let (lo, hi) = ds.data.column(j).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            let c = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo) * expansion;
            (c - half, c + half)
        })
        .collect();
    let mut rng = rng_from_seed(seed);
    let mut extra = Vec::with_capacity(m * p);
    let mut candidate = vec![0.0; p];
    let mut attempts = 0usize;
    while extra.len() < m * p {
        attempts += 1;
        if attempts > 1000 * m {
            return Err(Error::InvalidParameter("clusters leave no room for outlying contamination".into()));
        }
        for (c, &(lo, hi)) in candidate.iter_mut().zip(&bounds) {
            *c = if hi > lo { rng.random_range(lo..hi) } else { lo };
        }
        if let Some(limit) = min_mahalanobis {
            if ds.components.iter().any(|g| g.mahalanobis(&candidate) < limit) {
                continue;
            }
        }
        extra.extend_from_slice(&candidate);
    }
    let data = ds.data.vstack(&DataMatrix::new(extra, m, p)?)?;
    let big_k = ds.truth.k_groups();
    let mut labels = ds.truth.into_labels();
    labels.extend(std::iter::repeat_n(TRIMMED, m));
    let mut out = SyntheticDataset {
        data,
        truth: Partition::new(labels, big_k)?,
        scenario_tag: ds.scenario_tag,
        params_echo: ds.params_echo,
        components: ds.components,
    };
    out.echo("contamination_rate", rate);
    out.echo("contamination_m", m);
    out.echo("expansion", expansion);
    out.echo("contamination_seed", seed);
    if let Some(limit) = min_mahalanobis {
        out.echo("min_mahalanobis", limit);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// Two interleaved unit half-circles.
    TwoMoons,
    /// Two stacked parabolic bands.
    ParabolicBand,
    /// Three concentric half-circles with radii 0.5, 0.75 and 1.
    ConcentricArcs,
    /// Four blobs, each trailing a thin segment towards the centre.
    FourBlobsBridged,
}

impl Shape {
    pub fn n_groups(self) -> usize {
        match self {
            Shape::TwoMoons | Shape::ParabolicBand => 2,
            Shape::ConcentricArcs => 3,
            Shape::FourBlobsBridged => 4,
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_moons" => Ok(Shape::TwoMoons),
            "parabolic_band" => Ok(Shape::ParabolicBand),
            "concentric_arcs" => Ok(Shape::ConcentricArcs),
            "four_blobs_bridged" => Ok(Shape::FourBlobsBridged),
            other => Err(Error::InvalidParameter(format!("unknown shape '{other}'"))),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::TwoMoons => "two_moons",
            Shape::ParabolicBand => "parabolic_band",
            Shape::ConcentricArcs => "concentric_arcs",
            Shape::FourBlobsBridged => "four_blobs_bridged",
        })
    }
}

/// Curvature and vertical offset of the parabolic bands `y = a x^2 + b`.
pub const PARABOLA_A: f64 = 0.4;
pub const PARABOLA_OFFSETS: [f64; 2] = [0.0, 0.6];
pub const ARC_RADII: [f64; 3] = [0.5, 0.75, 1.0];
const BLOB_CENTRES: [[f64; 2]; 4] = [[2.0, 2.0], [-2.0, 2.0], [-2.0, -2.0], [2.0, -2.0]];
const BLOB_SD: f64 = 0.3;
const BRIDGE_FRACTION: f64 = 0.2;
const BRIDGE_REACH: f64 = 0.6;

/// Noise-free point of group `g` (0-based) at curve parameter `u` in `[0, 1)`.
fn curve_point(shape: Shape, g: usize, u: f64, rng: &mut StdRng) -> [f64; 2] {
    match shape {
        Shape::TwoMoons => {
            let t = PI * u;
            if g == 0 {
                [t.cos(), t.sin()]
            } else {
                [1.0 - t.cos(), 0.5 - t.sin()]
            }
        }
        Shape::ParabolicBand => {
            let x = 2.0 * u - 1.0;
            [x, PARABOLA_A * x * x + PARABOLA_OFFSETS[g]]
        }
        Shape::ConcentricArcs => {
            let t = PI * u;
            [ARC_RADII[g] * t.cos(), ARC_RADII[g] * t.sin()]
        }
        Shape::FourBlobsBridged => {
            let c = BLOB_CENTRES[g];
            if rng.random::<f64>() < BRIDGE_FRACTION {
                let s = BRIDGE_REACH * u;
                [c[0] * (1.0 - s), c[1] * (1.0 - s)]
            } else {
                [c[0] + BLOB_SD * gaussian(rng), c[1] + BLOB_SD * gaussian(rng)]
            }
        }
    }
}

/// Curve-shaped clusters in the plane with isotropic Gaussian jitter of
/// standard deviation `noise_sd`.
pub fn gen_shapes(shape: Shape, n_per_cluster: usize, noise_sd: f64, seed: u64) -> Result<SyntheticDataset> {
    if n_per_cluster < 50 {
        return Err(Error::InvalidParameter(format!("n_per_cluster must be at least 50, got {n_per_cluster}")));
    }
    if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise_sd must be non-negative, got {noise_sd}")));
    }
    let big_k = shape.n_groups();
    let mut rng = rng_from_seed(seed);
    let n = big_k * n_per_cluster;
    let mut values = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for g in 0..big_k {
        for _ in 0..n_per_cluster {
            let u: f64 = rng.random();
            let [x, y] = curve_point(shape, g, u, &mut rng);
            values.push(x + noise_sd * gaussian(&mut rng));
            values.push(y + noise_sd * gaussian(&mut rng));
            labels.push(g + 1);
        }
    }
    let mut ds = SyntheticDataset {
        data: DataMatrix::new(values, n, 2)?,
        truth: Partition::new(labels, big_k)?,
        scenario_tag: shape.to_string(),
        params_echo: BTreeMap::new(),
        components: Vec::new(),
    };
    ds.echo("shape", shape);
    ds.echo("n_per_cluster", n_per_cluster);
    ds.echo("noise_sd", noise_sd);
    ds.echo("seed", seed);
    Ok(ds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioId {
    /// Growing sample size.
    S1,
    /// Decreasing separation at fixed size.
    S2,
    /// Two moons.
    S3a,
    /// Concentric arcs.
    S3b,
    /// Bridged blobs.
    S3c,
}

impl ScenarioId {
    pub fn n_levels(self) -> usize {
        match self {
            ScenarioId::S1 => S1_LEVELS,
            ScenarioId::S2 => S2_SEPARATIONS.len(),
            _ => 1,
        }
    }

    pub fn big_k(self) -> usize {
        match self {
            ScenarioId::S1 | ScenarioId::S2 => 3,
            ScenarioId::S3a => 2,
            ScenarioId::S3b => 3,
            ScenarioId::S3c => 4,
        }
    }

    pub fn is_shape(self) -> bool {
        matches!(self, ScenarioId::S3a | ScenarioId::S3b | ScenarioId::S3c)
    }

    pub fn all() -> [ScenarioId; 5] {
        [ScenarioId::S1, ScenarioId::S2, ScenarioId::S3a, ScenarioId::S3b, ScenarioId::S3c]
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s1" => Ok(ScenarioId::S1),
            "s2" => Ok(ScenarioId::S2),
            "s3a" => Ok(ScenarioId::S3a),
            "s3b" => Ok(ScenarioId::S3b),
            "s3c" => Ok(ScenarioId::S3c),
            other => Err(Error::InvalidParameter(format!("unknown scenario '{other}'"))),
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioId::S1 => "s1",
            ScenarioId::S2 => "s2",
            ScenarioId::S3a => "s3a",
            ScenarioId::S3b => "s3b",
            ScenarioId::S3c => "s3c",
        })
    }
}

pub const GAUSSIAN_CONTAMINATION: f64 = 0.2;
pub const SHAPE_CONTAMINATION: f64 = 0.05;
pub const GAUSSIAN_HETEROGENEITY: f64 = 25.0;
/// Mahalanobis radius of the 99.9% region of a bivariate Gaussian; noise in
/// the Gaussian scenarios stays outside it.
pub const NOISE_MAHALANOBIS: f64 = 3.717;
/// Separation used by the growing-size scenario.
pub const S1_SEPARATION: f64 = 1.75;
pub const S1_LEVELS: usize = 10;
pub const S2_N: usize = 5000;
/// Separation levels of the overlap sweep, from well separated to overlapping.
pub const S2_SEPARATIONS: [f64; 5] = [3.0, 2.5, 2.0, 1.75, 1.5];
pub const SHAPE_NOISE_SD: f64 = 0.05;

/// Total clean sample size for scenario 1 at grid level `level`.
pub fn s1_n(level: usize) -> usize {
    1000 + (level as f64 * 44000.0 / (S1_LEVELS - 1) as f64).round() as usize
}

/// Recommended trimming level for `m` contaminants among `n + m` points:
/// `m/(n+m) - m/(10(n+m))`.
pub fn recommended_alpha(n: usize, m: usize) -> f64 {
    let total = (n + m) as f64;
    m as f64 / total - m as f64 / (10.0 * total)
}

fn scaled(n: usize, scale: f64) -> usize {
    ((n as f64 * scale).round() as usize).max(1)
}

/// Smallest level of scenario `id`.
pub fn scenario(id: ScenarioId, scale: f64, seed: u64) -> Result<SyntheticDataset> {
    scenario_at(id, 0, scale, seed)
}

/// Scenario `id` at grid level `level` (sample-size level for `S1`,
/// separation level for `S2`, ignored otherwise). `scale` in `(0, 1]`
/// shrinks every sample size.
pub fn scenario_at(id: ScenarioId, level: usize, scale: f64, seed: u64) -> Result<SyntheticDataset> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::InvalidParameter(format!("scale {scale} is outside (0, 1]")));
    }
    let big_k = id.big_k();
    let n = match id {
        ScenarioId::S1 => scaled(s1_n(level.min(S1_LEVELS - 1)), scale),
        ScenarioId::S2 => scaled(S2_N, scale),
        ScenarioId::S3a => big_k * scaled(1000, scale).max(50),
        ScenarioId::S3b => big_k * scaled(3000, scale).max(50),
        ScenarioId::S3c => big_k * scaled(5000, scale).max(50),
    };
    let mut ds = scenario_sized(id, level, n, seed)?;
    ds.echo("scale", scale);
    Ok(ds)
}

/// Scenario `id` at grid level `level` with `n` clean observations (split
/// evenly; shape scenarios round down to a multiple of the group count).
pub fn scenario_sized(id: ScenarioId, level: usize, n: usize, seed: u64) -> Result<SyntheticDataset> {
    if level >= id.n_levels() {
        return Err(Error::InvalidParameter(format!("scenario {id} has {} levels, got level {level}", id.n_levels())));
    }
    let data_seed = derive_seed(seed, 1);
    let noise_seed = derive_seed(seed, 2);
    let big_k = id.big_k();
    let mut ds = match id {
        ScenarioId::S1 | ScenarioId::S2 => {
            let sep = match id {
                ScenarioId::S1 => S1_SEPARATION,
                _ => S2_SEPARATIONS[level],
            };
            let sizes = split_evenly(n.max(big_k), big_k);
            let ds = gen_gaussian_mixture_sizes(&sizes, 2, sep, GAUSSIAN_HETEROGENEITY, data_seed)?;
            add_outlying_contamination(ds, GAUSSIAN_CONTAMINATION, DEFAULT_EXPANSION, NOISE_MAHALANOBIS, noise_seed)?
        }
        _ => {
            let shape = match id {
                ScenarioId::S3a => Shape::TwoMoons,
                ScenarioId::S3b => Shape::ConcentricArcs,
                _ => Shape::FourBlobsBridged,
            };
            let ds = gen_shapes(shape, n / big_k, SHAPE_NOISE_SD, data_seed)?;
            add_uniform_contamination(ds, SHAPE_CONTAMINATION, DEFAULT_EXPANSION, noise_seed)?
        }
    };
    let m = ds.n_contaminants();
    let clean = ds.data.n() - m;
    ds.scenario_tag = id.to_string();
    ds.echo("scenario", id);
    ds.echo("level", level);
    ds.echo("recommended_alpha", recommended_alpha(clean, m));
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_blob_is_all_ones() {
        let ds = gen_gaussian_mixture(1, 100, 3, 2.0, 1.0, 4).unwrap();
        assert_eq!(ds.data.n(), 100);
        assert!(ds.truth.labels().iter().all(|&l| l == 1));
    }

    #[test]
    fn exact_counts_and_separation() {
        let ds = gen_gaussian_mixture(4, 37, 2, 1.5, 3.0, 9).unwrap();
        assert_eq!(ds.truth.group_sizes(), vec![37; 4]);
        assert_eq!(ds.n_contaminants(), 0);
    }

    #[test]
    fn contamination_counts_and_box() {
        let ds = gen_gaussian_mixture(2, 500, 2, 2.0, 2.0, 1).unwrap();
        let lo: Vec<f64> = (0..2).map(|j| ds.data.column(j).fold(f64::INFINITY, f64::min)).collect();
        let hi: Vec<f64> = (0..2).map(|j| ds.data.column(j).fold(f64::NEG_INFINITY, f64::max)).collect();
        let out = add_uniform_contamination(ds.clone(), 0.2, 1.2, 3).unwrap();
        assert_eq!(out.data.n(), 1200);
        assert_eq!(out.n_contaminants(), 200);
        assert!(out.truth.labels()[1000..].iter().all(|&l| l == TRIMMED));
        for i in 1000..1200 {
            for j in 0..2 {
                let c = 0.5 * (lo[j] + hi[j]);
                let half = 0.6 * (hi[j] - lo[j]);
                let v = out.data.row(i)[j];
                assert!(v >= c - half - 1e-12 && v <= c + half + 1e-12);
            }
        }
        assert_eq!(add_uniform_contamination(ds.clone(), 0.0, 1.2, 3).unwrap(), ds);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = scenario(ScenarioId::S1, 0.5, 11).unwrap();
        let b = scenario(ScenarioId::S1, 0.5, 11).unwrap();
        assert_eq!(a, b);
        let c = scenario(ScenarioId::S1, 0.5, 12).unwrap();
        assert_ne!(a.data, c.data);
    }

    #[test]
    fn moons_lie_on_their_arcs_without_noise() {
        let ds = gen_shapes(Shape::TwoMoons, 200, 0.0, 5).unwrap();
        for (x, &l) in ds.data.rows().zip(ds.truth.labels()) {
            let centre = if l == 1 { [0.0, 0.0] } else { [1.0, 0.5] };
            let r = ((x[0] - centre[0]).powi(2) + (x[1] - centre[1]).powi(2)).sqrt();
            assert!((r - 1.0).abs() < 1e-9);
            if l == 1 {
                assert!(x[1] >= -1e-12);
            } else {
                assert!(x[1] <= 0.5 + 1e-12);
            }
        }
    }

    #[test]
    fn arcs_separate_by_radius() {
        let ds = gen_shapes(Shape::ConcentricArcs, 100, 0.0, 5).unwrap();
        for (x, &l) in ds.data.rows().zip(ds.truth.labels()) {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            assert!((r - ARC_RADII[l - 1]).abs() < 1e-9);
        }
        assert_eq!(ARC_RADII[0] / ARC_RADII[2], 0.5);
    }

    #[test]
    fn scenario_sizes() {
        let s1 = scenario(ScenarioId::S1, 1.0, 0).unwrap();
        assert_eq!(s1.data.n() - s1.n_contaminants(), 1000);
        assert_eq!(s1.n_contaminants(), 200);
        assert_eq!(s1.truth.group_sizes(), vec![334, 333, 333]);
        assert_eq!(s1_n(0), 1000);
        assert_eq!(s1_n(S1_LEVELS - 1), 45000);
        let s3 = scenario(ScenarioId::S3a, 1.0, 0).unwrap();
        assert_eq!(s3.truth.group_sizes(), vec![1000, 1000]);
        assert_eq!(s3.n_contaminants(), 100);
        let s2 = scenario(ScenarioId::S2, 0.2, 0).unwrap();
        assert_eq!(s2.data.n() - s2.n_contaminants(), 1000);
        assert!(scenario_at(ScenarioId::S2, 5, 1.0, 0).is_err());
    }

    #[test]
    fn recommended_alpha_formula() {
        assert!((recommended_alpha(2000, 100) - 0.9 * 100.0 / 2100.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_inputs() {
        assert!(gen_gaussian_mixture(2, 10, 2, 0.0, 1.0, 0).is_err());
        assert!(gen_shapes(Shape::TwoMoons, 10, 0.1, 0).is_err());
        assert_eq!(
            gen_gaussian_mixture(200, 10, 1, 1.0, 1.0, 0).unwrap_err(),
            Error::SeparationInfeasible(1.0, MAX_PLACEMENT_ATTEMPTS)
        );
    }
}
