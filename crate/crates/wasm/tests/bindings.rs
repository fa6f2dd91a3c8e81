use tkmerge::metrics::ari_labels;
use tkmerge_wasm::{fit_impl, generate_impl, monitor_impl};

fn usize_labels(v: &[u32]) -> Vec<usize> {
    v.iter().map(|&l| l as usize).collect()
}

#[test]
fn moons_round_trip_through_the_bindings() {
    let ds = generate_impl("s3a", 0.3, 1).unwrap();
    assert_eq!(ds.groups(), 2);
    let points = ds.points();
    assert_eq!(points.len(), 2 * ds.truth().len());
    let labels = fit_impl(&points, 2, 0, ds.alpha(), "tkm", 1.0, "single", 1).unwrap();
    let a = ari_labels(&usize_labels(&labels), &usize_labels(&ds.truth())).unwrap();
    assert!(a > 0.8, "ARI {a}");
}

#[test]
fn monitor_returns_the_default_grid() {
    let ds = generate_impl("s1", 0.3, 2).unwrap();
    let t = monitor_impl(&ds.points(), 3, "tkm", 2).unwrap();
    assert_eq!(t.alphas().len(), 9);
    assert_eq!(t.scores().len(), 8);
    assert_eq!(t.labels().len(), ds.truth().len());
    assert!(t.alphas().contains(&t.best_alpha()));
}

#[test]
fn bad_inputs_are_reported() {
    assert!(generate_impl("s9", 1.0, 0).is_err());
    assert!(fit_impl(&[0.0, 1.0, 2.0], 1, 1, 0.0, "tkm", 1.0, "single", 0).is_err());
    assert!(fit_impl(&[0.0, 0.0, 1.0, 1.0], 1, 1, 0.0, "kmeans", 1.0, "single", 0).is_err());
    assert!(fit_impl(&[0.0, 0.0, 1.0, 1.0], 3, 2, 0.0, "tkm", 1.0, "single", 0).is_err());
}
