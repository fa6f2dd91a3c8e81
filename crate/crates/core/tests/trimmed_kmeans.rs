use proptest::prelude::*;
use tkmerge::linalg::sq_dist;
use tkmerge::metrics::ari_labels;
use tkmerge::{fit_kmeans, fit_tkmeans, retained_count, DataMatrix, TkmFit, TRIMMED};
use tkmerge_oracle::{exhaustive_tkmeans, lloyd_from_all_seeds, same_partition, trimmed_sse};

fn matrix(rows: &[Vec<f64>]) -> DataMatrix {
    DataMatrix::from_rows(rows).unwrap()
}

fn five_points(outlier: f64) -> Vec<Vec<f64>> {
    vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![10.0, 10.0], vec![10.0, 11.0], vec![outlier, outlier]]
}

#[test]
fn five_point_example_matches_exhaustive_search() {
    let rows = five_points(100.0);
    let (best, winners) = exhaustive_tkmeans(&rows, 2, 4);
    for seed in 0..10 {
        let fit = fit_tkmeans(&matrix(&rows), 2, 0.2, 20, 100, 1e-8, seed).unwrap();
        assert!((fit.objective - best).abs() < 1e-12);
        assert!(winners.iter().any(|w| same_partition(w, fit.partition.labels())));
        assert_eq!(fit.partition.labels()[4], TRIMMED);
        let mut c = fit.model.centroids.clone();
        c.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(c, vec![vec![0.0, 0.5], vec![10.0, 10.5]]);
    }
}

#[test]
fn outlier_distance_does_not_move_centroids() {
    let near = fit_tkmeans(&matrix(&five_points(100.0)), 2, 0.2, 20, 100, 1e-8, 5).unwrap();
    let far = fit_tkmeans(&matrix(&five_points(1e6)), 2, 0.2, 20, 100, 1e-8, 5).unwrap();
    let sorted = |f: &TkmFit| {
        let mut c = f.model.centroids.clone();
        c.sort_by(|a, b| a[0].total_cmp(&b[0]));
        c
    };
    for (a, b) in sorted(&near).iter().zip(sorted(&far).iter()) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn half_trimmed_line_keeps_a_contiguous_half() {
    let xs = [0.0, 1.0, 2.0, 3.0, 100.0, 101.0, 102.0, 103.0];
    let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    let (best, winners) = exhaustive_tkmeans(&rows, 1, 4);
    let fit = fit_tkmeans(&matrix(&rows), 1, 0.5, 20, 100, 1e-8, 0).unwrap();
    assert!((fit.objective - best).abs() < 1e-12);
    assert!(winners.iter().any(|w| w == fit.partition.labels()));
    let kept: Vec<f64> = xs.iter().zip(fit.partition.labels()).filter(|(_, &l)| l != TRIMMED).map(|(x, _)| *x).collect();
    assert!(kept == vec![0.0, 1.0, 2.0, 3.0] || kept == vec![100.0, 101.0, 102.0, 103.0]);
    let mean = kept.iter().sum::<f64>() / 4.0;
    assert!((fit.model.centroids[0][0] - mean).abs() < 1e-12);
}

fn triplet_rows() -> Vec<Vec<f64>> {
    // three groups of ten on a line, spread over a unit interval each
    (0..30)
        .map(|i| {
            let g = (i / 10) as f64;
            let jitter = ((i * 7) % 10) as f64 / 10.0;
            vec![20.0 * g + jitter]
        })
        .collect()
}

#[test]
fn separated_groups_match_lloyd_from_every_seed_triple() {
    let rows = triplet_rows();
    let (best, labels) = lloyd_from_all_seeds(&rows, 3);
    let fit = fit_kmeans(&matrix(&rows), 3, 20, 100, 1e-8, 3).unwrap();
    assert!((fit.objective - best).abs() <= 1e-9 * best);
    assert_eq!(ari_labels(fit.partition.labels(), &labels).unwrap(), 1.0);
    let truth: Vec<usize> = (0..30).map(|i| i / 10 + 1).collect();
    assert_eq!(ari_labels(fit.partition.labels(), &truth).unwrap(), 1.0);
}

#[test]
fn alpha_zero_is_kmeans_with_the_same_seed() {
    let rows: Vec<Vec<f64>> = (0..60).map(|i| vec![(i as f64 * 0.37).sin() * 5.0, (i as f64 * 0.11).cos() * 3.0]).collect();
    for seed in 0..5 {
        let a = fit_kmeans(&matrix(&rows), 4, 10, 100, 1e-8, seed).unwrap();
        let b = fit_tkmeans(&matrix(&rows), 4, 0.0, 10, 100, 1e-8, seed).unwrap();
        assert_eq!(a.partition, b.partition);
        assert_eq!(a.objective, b.objective);
    }
}

fn data_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (6usize..60, 1usize..4).prop_flat_map(|(n, p)| prop::collection::vec(prop::collection::vec(-50.0f64..50.0, p), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn retains_exactly_the_trimmed_count(rows in data_strategy(), alpha in 0.0f64..=0.5, k in 1usize..4, seed in any::<u64>()) {
        let n = rows.len();
        let h = retained_count(n, alpha);
        prop_assume!(k <= h);
        let fit = fit_tkmeans(&matrix(&rows), k, alpha, 3, 100, 1e-8, seed).unwrap();
        prop_assert_eq!(fit.partition.n_retained(), h);
        prop_assert_eq!(fit.partition.n_trimmed(), n - h);
        prop_assert_eq!(fit.model.sizes.iter().sum::<usize>(), h);
        prop_assert!(fit.model.sizes.iter().all(|&s| s > 0));
    }

    #[test]
    fn objective_history_never_increases(rows in data_strategy(), alpha in 0.0f64..=0.5, seed in any::<u64>()) {
        let fit = fit_tkmeans(&matrix(&rows), 2, alpha, 2, 100, 1e-8, seed).unwrap();
        for w in fit.history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-10 * w[0].abs().max(f64::MIN_POSITIVE));
        }
        let sse = trimmed_sse(&rows, fit.partition.labels(), 2).unwrap();
        prop_assert!((sse - fit.objective).abs() <= 1e-9 * sse.max(1.0));
    }

    #[test]
    fn trimmed_points_are_the_farthest(rows in data_strategy(), alpha in 0.05f64..=0.5, seed in any::<u64>()) {
        let data = matrix(&rows);
        prop_assume!(retained_count(rows.len(), alpha) >= 2);
        let fit = fit_tkmeans(&data, 2, alpha, 2, 500, 0.0, seed).unwrap();
        prop_assume!(fit.converged);
        let nearest = |x: &[f64]| fit.model.centroids.iter().map(|c| sq_dist(x, c)).fold(f64::INFINITY, f64::min);
        let mut kept_max = 0.0f64;
        let mut trimmed_min = f64::INFINITY;
        for (x, &l) in data.rows().zip(fit.partition.labels()) {
            if l == TRIMMED {
                trimmed_min = trimmed_min.min(nearest(x));
            } else {
                kept_max = kept_max.max(sq_dist(x, &fit.model.centroids[l - 1]));
            }
        }
        prop_assert!(kept_max <= trimmed_min * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn identical_seeds_give_identical_fits(rows in data_strategy(), seed in any::<u64>()) {
        let a = fit_tkmeans(&matrix(&rows), 2, 0.1, 4, 100, 1e-8, seed).unwrap();
        let b = fit_tkmeans(&matrix(&rows), 2, 0.1, 4, 100, 1e-8, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}
