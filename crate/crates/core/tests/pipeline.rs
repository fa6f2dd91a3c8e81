use tkmerge::datagen::{
    add_outlying_contamination, add_uniform_contamination, gen_gaussian_mixture, gen_gaussian_mixture_sizes,
    gen_shapes, recommended_alpha, split_evenly, Shape,
};
use tkmerge::metrics::{ari_labels, median};
use tkmerge::pipeline::default_k;
use tkmerge::{
    ari, fit_kmeans, fit_tc_merge, fit_tk_merge, fit_tkmeans, retained_count, DataMatrix, FitConfig, KHeuristic,
    Linkage, Method, Metric, Partition, TRIMMED,
};

fn cfg(big_k: usize, k: usize, alpha: f64, seed: u64) -> FitConfig {
    FitConfig { big_k, k, alpha, seed, ..FitConfig::default() }
}

#[test]
fn default_k_values() {
    assert_eq!(default_k(5000, Method::Tkm), 17);
    assert_eq!(default_k(5000, Method::Tc), 9);
    assert_eq!(default_k(8, Method::Tkm), 4);
    assert_eq!(KHeuristic::TwoKLogN.components(2000, 2), 30);
    assert_eq!(KHeuristic::LogN.components(10, 3), 4);
}

#[test]
fn no_inflation_reproduces_the_first_step() {
    let ds = gen_gaussian_mixture(3, 100, 2, 50.0, 2.0, 4).unwrap();
    let km = fit_kmeans(&ds.data, 3, 10, 100, 1e-8, 1).unwrap();
    let merged = fit_tk_merge(&ds.data, &cfg(3, 3, 0.0, 1)).unwrap();
    assert_eq!(ari(&merged.final_partition, &km.partition).unwrap(), 1.0);
    assert_eq!(ari(&merged.final_partition, &ds.truth).unwrap(), 1.0);
}

#[test]
fn unit_restriction_routes_to_trimmed_kmeans() {
    let ds = gen_gaussian_mixture(2, 150, 2, 3.0, 4.0, 8).unwrap();
    let c = FitConfig { r: 1.0, ..cfg(2, 6, 0.1, 3) };
    let tc = fit_tc_merge(&ds.data, &c).unwrap();
    let tk = fit_tk_merge(&ds.data, &c).unwrap();
    assert!(tc.routed_to_tkmeans);
    assert!(!tk.routed_to_tkmeans);
    assert_eq!(tc.final_partition, tk.final_partition);
    assert_eq!(tc.merge, tk.merge);
    assert_eq!(tc.first_step.method(), Method::Tkm);
}

#[test]
fn merging_keeps_the_trimmed_set_and_maps_components() {
    let ds = gen_gaussian_mixture(3, 120, 2, 2.0, 5.0, 2).unwrap();
    let ds = add_uniform_contamination(ds, 0.1, 1.2, 3).unwrap();
    let c = cfg(3, 8, 0.1, 5);
    let res = fit_tk_merge(&ds.data, &c).unwrap();
    let first = res.first_step.partition().labels();
    let fin = res.final_partition.labels();
    assert_eq!(res.final_partition.n_retained(), retained_count(ds.data.n(), 0.1));
    for (&a, &b) in first.iter().zip(fin) {
        if a == TRIMMED {
            assert_eq!(b, TRIMMED);
        } else {
            assert_eq!(b, res.merge.component_to_group[a - 1]);
        }
    }
}

#[test]
fn disconnected_components_share_a_group() {
    // blobs at x = 0 and x = 6 are closer to each other than to the one at x = 40
    let mut rows = Vec::new();
    for (i, cx) in [0.0, 6.0, 40.0].iter().enumerate() {
        for j in 0..30 {
            let t = j as f64 / 30.0 * std::f64::consts::TAU;
            let r = 0.2 + 0.02 * ((i * 30 + j) % 7) as f64;
            rows.push(vec![cx + r * t.cos(), r * t.sin()]);
        }
    }
    let data = DataMatrix::from_rows(&rows).unwrap();
    let res = fit_tk_merge(&data, &cfg(2, 3, 0.0, 0)).unwrap();
    let map = &res.merge.component_to_group;
    let mut counts = [0usize; 3];
    for &g in map {
        counts[g] += 1;
    }
    assert!(counts.iter().any(|&c| c == 2), "map {map:?}");
    let labels = res.final_partition.labels();
    assert_eq!(labels[0], labels[30]);
    assert_ne!(labels[0], labels[60]);
    // no observation of the merged group sits in the empty gap between the two blobs
    let merged: Vec<f64> = rows.iter().zip(labels).filter(|(_, &l)| l == labels[0]).map(|(x, _)| x[0]).collect();
    assert!(merged.iter().all(|&x| x < 1.0 || x > 5.0));
}

#[test]
fn single_group_without_trimming_labels_everything_one() {
    let ds = gen_gaussian_mixture(2, 60, 2, 2.0, 2.0, 1).unwrap();
    let res = fit_tk_merge(&ds.data, &cfg(1, 4, 0.0, 0)).unwrap();
    assert!(res.final_partition.labels().iter().all(|&l| l == 1));
}

#[test]
fn identical_inputs_give_identical_results() {
    let ds = gen_shapes(Shape::FourBlobsBridged, 60, 0.05, 11).unwrap();
    for metric in [Metric::EuclideanCentroid, Metric::DempMc] {
        let c = FitConfig { metric, n_mc: 2000, r: 12.0, linkage: Linkage::Average, ..cfg(4, 9, 0.05, 6) };
        let a = fit_tc_merge(&ds.data, &c).unwrap();
        let b = fit_tc_merge(&ds.data, &c).unwrap();
        assert_eq!(a.final_partition, b.final_partition);
        assert_eq!(a.dissimilarity, b.dissimilarity);
    }
}

#[test]
fn k_smaller_than_groups_is_rejected() {
    let ds = gen_gaussian_mixture(2, 30, 2, 2.0, 2.0, 1).unwrap();
    assert!(fit_tk_merge(&ds.data, &cfg(3, 2, 0.0, 0)).is_err());
}

#[test]
fn two_moons_are_recovered() {
    let ds = gen_shapes(Shape::TwoMoons, 1000, 0.05, 21).unwrap();
    let ds = add_uniform_contamination(ds, 0.05, 1.2, 22).unwrap();
    let n = ds.data.n();
    let m = ds.n_contaminants();
    let k = KHeuristic::TwoKLogN.components(n, 2);
    let alpha = recommended_alpha(n - m, m);
    let res = fit_tk_merge(&ds.data, &cfg(2, k, alpha, 21)).unwrap();
    let a = ari(&res.final_partition, &ds.truth).unwrap();
    assert!(a >= 0.9, "ARI {a}");
}

#[test]
fn a_noisy_band_is_kept_by_tc_merge() {
    let band = gen_shapes(Shape::ParabolicBand, 600, 0.05, 3).unwrap();
    let keep: Vec<usize> = (0..band.data.n()).filter(|&i| band.truth.labels()[i] == 1).collect();
    let rows: Vec<Vec<f64>> = keep.iter().map(|&i| band.data.row(i).to_vec()).collect();
    let mut single = band.clone();
    single.data = DataMatrix::from_rows(&rows).unwrap();
    single.truth = Partition::new(vec![1; rows.len()], 1).unwrap();
    let ds = add_uniform_contamination(single, 0.2, 1.2, 4).unwrap();
    let m = ds.n_contaminants();
    let alpha = recommended_alpha(ds.data.n() - m, m);
    let c = FitConfig { r: 12.0, ..cfg(1, 6, alpha, 2) };
    let res = fit_tc_merge(&ds.data, &c).unwrap();
    let retained: Vec<usize> = (0..ds.data.n()).filter(|&i| !res.final_partition.is_trimmed(i)).collect();
    let on_band = retained.iter().filter(|&&i| ds.truth.labels()[i] == 1).count();
    let share = on_band as f64 / retained.len() as f64;
    assert!(share >= 0.9, "share {share}");
}

#[test]
fn merging_improves_trimmed_kmeans_on_contaminated_gaussians() {
    let mut gain = Vec::new();
    for s in 0..5 {
        let ds = gen_gaussian_mixture_sizes(&split_evenly(900, 3), 2, 1.75, 25.0, s).unwrap();
        let ds = add_outlying_contamination(ds, 0.2, 1.2, 3.717, s + 1000).unwrap();
        let alpha = 180.0 / 1080.0;
        let tkm = fit_tkmeans(&ds.data, 3, alpha, 20, 100, 1e-8, s).unwrap();
        let merged = fit_tk_merge(&ds.data, &cfg(3, 6, alpha, s)).unwrap();
        let a = ari_labels(merged.final_partition.labels(), ds.truth.labels()).unwrap();
        let b = ari_labels(tkm.partition.labels(), ds.truth.labels()).unwrap();
        gain.push(a - b);
    }
    assert!(median(&gain).unwrap() >= 0.0, "{gain:?}");
}
