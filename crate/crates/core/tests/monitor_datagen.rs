use nalgebra::{DMatrix, DVector};
use rand::Rng;
use tkmerge::datagen::{
    add_outlying_contamination, add_uniform_contamination, gen_gaussian_mixture, gen_shapes, scenario,
    scenario_at, ScenarioId, Shape, SyntheticDataset, NOISE_MAHALANOBIS,
};
use tkmerge::monitor::default_grid;
use tkmerge::rng::rng_from_seed;
use tkmerge::{ari, fit_kmeans, monitor_alpha, DataMatrix, Method, MonitorConfig, MonitorTarget, Partition};

/// Two clusters (700 points) plus 300 points in a far square: exactly 30%.
fn clumped(seed: u64) -> SyntheticDataset {
    let mut ds = gen_gaussian_mixture(2, 350, 2, 3.0, 4.0, seed).unwrap();
    let mut rng = rng_from_seed(seed + 99);
    let far: Vec<f64> = (0..600).map(|_| rng.random_range(40.0..44.0)).collect();
    ds.data = ds.data.vstack(&DataMatrix::new(far, 300, 2).unwrap()).unwrap();
    let mut labels = ds.truth.labels().to_vec();
    labels.extend(std::iter::repeat_n(0, 300));
    ds.truth = Partition::new(labels, 2).unwrap();
    ds
}

#[test]
fn thirty_percent_clump_is_found() {
    for method in [Method::Tkm, Method::Tc] {
        for seed in 0..3 {
            let ds = clumped(seed);
            let cfg = MonitorConfig { seed, ..MonitorConfig::new(2, method) };
            let trace = monitor_alpha(&ds.data, &cfg, Some(&ds.truth)).unwrap();
            assert_eq!(trace.best_alpha, 0.30, "{method:?} seed {seed}: {:?}", trace.scores);
        }
    }
}

#[test]
fn clean_data_needs_little_trimming() {
    for seed in 0..3 {
        let ds = gen_gaussian_mixture(2, 500, 2, 3.0, 4.0, seed).unwrap();
        let cfg = MonitorConfig { seed, ..MonitorConfig::new(2, Method::Tkm) };
        let trace = monitor_alpha(&ds.data, &cfg, None).unwrap();
        assert!(trace.best_alpha <= 0.05, "seed {seed}: {}", trace.best_alpha);
    }
}

#[test]
fn trace_has_one_entry_per_level() {
    let ds = clumped(5);
    let cfg = MonitorConfig { n_starts: 3, ..MonitorConfig::new(2, Method::Tkm) };
    let trace = monitor_alpha(&ds.data, &cfg, None).unwrap();
    assert_eq!(trace.alphas, default_grid());
    assert_eq!(trace.partitions.len(), 9);
    assert_eq!(trace.scores.len(), 8);
    assert_eq!(trace.unrestricted_scores.len(), 8);
    assert!(trace.alphas.contains(&trace.best_alpha));
    assert!(trace.scores.iter().all(|s| (-1.0..=1.0).contains(s)));
    let csv = trace.to_csv();
    assert_eq!(csv.lines().count(), 10);
    assert!(csv.starts_with("alpha,score_consecutive,score_unrestricted,n_trimmed\n0.40,"));

    let short = MonitorConfig { grid: vec![0.2, 0.1, 0.0], ..cfg.clone() };
    let t = monitor_alpha(&ds.data, &short, None).unwrap();
    assert_eq!((t.partitions.len(), t.scores.len()), (3, 2));
    for grid in [vec![0.2], vec![0.1, 0.2], vec![0.6, 0.1]] {
        assert!(monitor_alpha(&ds.data, &MonitorConfig { grid, ..cfg.clone() }, None).is_err());
    }
}

#[test]
fn monitoring_is_deterministic_and_truth_mode_uses_labels() {
    let ds = clumped(1);
    let cfg = MonitorConfig { n_starts: 4, target: MonitorTarget::GroundTruth, ..MonitorConfig::new(2, Method::Tkm) };
    let a = monitor_alpha(&ds.data, &cfg, Some(&ds.truth)).unwrap();
    let b = monitor_alpha(&ds.data, &cfg, Some(&ds.truth)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.best_alpha, 0.30);
    assert!(monitor_alpha(&ds.data, &cfg, None).is_err());
}

#[test]
fn far_apart_mixture_is_recovered_by_kmeans() {
    for seed in 0..3 {
        let ds = gen_gaussian_mixture(3, 200, 2, 50.0, 5.0, seed).unwrap();
        let fit = fit_kmeans(&ds.data, 3, 10, 100, 1e-8, seed).unwrap();
        assert_eq!(ari(&fit.partition, &ds.truth).unwrap(), 1.0);
    }
}

#[test]
fn mixture_respects_separation_and_counts() {
    let ds = gen_gaussian_mixture(4, 75, 3, 1.5, 9.0, 12).unwrap();
    assert_eq!(ds.data.n(), 300);
    assert_eq!(ds.truth.group_sizes(), vec![75; 4]);
    let c = &ds.components;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let d: f64 = c[i].mean.iter().zip(&c[j].mean).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let sd = |k: usize| c[k].eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v)).sqrt();
            assert!(d >= 1.5 * (sd(i) + sd(j)) * (1.0 - 1e-12));
        }
    }
    let sphere = gen_gaussian_mixture(2, 60, 2, 2.0, 1.0, 3).unwrap();
    for comp in &sphere.components {
        assert!((comp.eigenvalues[0] - comp.eigenvalues[1]).abs() <= 1e-12 * comp.eigenvalues[0]);
    }
    let one = gen_gaussian_mixture(1, 80, 2, 2.0, 3.0, 3).unwrap();
    assert!(one.truth.labels().iter().all(|&l| l == 1));
}

#[test]
fn contamination_counts_and_placement() {
    let ds = gen_gaussian_mixture(2, 500, 2, 2.0, 4.0, 1).unwrap();
    let same = add_uniform_contamination(ds.clone(), 0.0, 1.2, 2).unwrap();
    assert_eq!(same.data, ds.data);
    let noisy = add_uniform_contamination(ds.clone(), 0.2, 1.2, 2).unwrap();
    assert_eq!(noisy.n_contaminants(), 200);
    assert_eq!(&noisy.truth.labels()[1000..], &[0; 200][..]);

    let outlying = add_outlying_contamination(ds.clone(), 0.2, 1.2, NOISE_MAHALANOBIS, 2).unwrap();
    assert_eq!(outlying.n_contaminants(), 200);
    for i in 1000..1200 {
        let x = outlying.data.row(i);
        assert!(outlying.components.iter().all(|c| c.mahalanobis(x) >= NOISE_MAHALANOBIS));
    }
}

#[test]
fn parabolic_band_residuals_match_the_jitter() {
    let noise_sd = 0.05;
    let ds = gen_shapes(Shape::ParabolicBand, 2000, noise_sd, 7).unwrap();
    let idx: Vec<usize> = (0..ds.data.n()).filter(|&i| ds.truth.labels()[i] == 1).collect();
    let x = DMatrix::from_fn(idx.len(), 3, |r, c| ds.data.row(idx[r])[0].powi(c as i32));
    let y = DVector::from_iterator(idx.len(), idx.iter().map(|&i| ds.data.row(i)[1]));
    let coef = x.clone().svd(true, true).solve(&y, 1e-12).unwrap();
    let resid = &y - &x * &coef;
    let sd = (resid.norm_squared() / (idx.len() - 3) as f64).sqrt();
    // horizontal jitter leaks into the vertical residual through the slope
    assert!(sd > noise_sd * 0.9 && sd < noise_sd * 1.25, "sd {sd}");
    assert!((coef[2] - 0.4).abs() < 0.05);
}

#[test]
fn scenarios_have_the_documented_sizes() {
    let s1 = scenario(ScenarioId::S1, 1.0, 0).unwrap();
    assert_eq!((s1.data.n(), s1.n_contaminants()), (1200, 200));
    let s2 = scenario(ScenarioId::S2, 1.0, 0).unwrap();
    assert_eq!(s2.data.n() - s2.n_contaminants(), 5000);
    let s3 = scenario(ScenarioId::S3a, 1.0, 0).unwrap();
    assert_eq!(s3.truth.group_sizes(), vec![1000, 1000]);
    assert_eq!(s3.k_groups(), 2);
    assert_eq!(s3.n_contaminants(), 100);
    let last = scenario_at(ScenarioId::S1, ScenarioId::S1.n_levels() - 1, 0.1, 0).unwrap();
    assert_eq!(last.data.n() - last.n_contaminants(), 4500);
}

#[test]
fn identical_seeds_give_identical_datasets() {
    for id in ScenarioId::all() {
        let a = scenario(id, 0.1, 4).unwrap();
        let b = scenario(id, 0.1, 4).unwrap();
        assert_eq!(a, b);
        let c = scenario(id, 0.1, 5).unwrap();
        assert_ne!(a.data, c.data);
    }
}
