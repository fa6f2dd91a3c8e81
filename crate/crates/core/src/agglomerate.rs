//! Dissimilarities between fitted components and their agglomerative
//! merging.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{GaussianLogDensity, SymEigen};
use crate::model::{tol, ClusterModel, Dendrogram, Dissimilarity, Linkage, Merge, Metric};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeResult {
    pub dendrogram: Dendrogram,
    /// Final group (1-based) of each first-step component.
    pub component_to_group: Vec<usize>,
}

/// Euclidean distances between component centroids.
pub fn centroid_dissimilarity(model: &ClusterModel) -> Dissimilarity {
    let c = &model.centroids;
    Dissimilarity::from_fn(c.len(), Metric::EuclideanCentroid, |i, j| {
        crate::linalg::sq_dist(&c[i], &c[j]).sqrt()
    })
}

/// Monte-Carlo misclassification dissimilarity.
///
/// For each component `i`, `n_mc` points are drawn from `N(mu_i, Sigma_i)`;
/// `P(i -> j)` is the fraction for which `pi_j phi_j > pi_i phi_i` (exact
/// ties count one half). The pair overlap is
/// `w_ij = pi_i P(i -> j) + pi_j P(j -> i)` and the dissimilarity is
/// `max(0, 1 - w_ij)`.
pub fn demp_dissimilarity(model: &ClusterModel, n_mc: usize, seed: u64) -> Result<Dissimilarity> {
    if n_mc < 1000 {
        return Err(Error::InvalidParameter(format!("n_mc must be at least 1000, got {n_mc}")));
    }
    let k = model.n_components();
    let p = model.dim();
    let eigs: Vec<SymEigen> = model.covariances.iter().map(SymEigen::new).collect();
    for (j, e) in eigs.iter().enumerate() {
        let scale = e.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        if e.values.iter().any(|&v| v < tol::PSD * scale) {
            return Err(Error::NonPsdCovariance(j));
        }
    }
    let top = eigs.iter().flat_map(|e| e.values.iter().copied()).fold(0.0f64, f64::max);
    let floor = (top * 1e-10).max(1e-12);
    let densities: Vec<GaussianLogDensity> = eigs
        .iter()
        .zip(&model.centroids)
        .map(|(e, mu)| {
            let mut e = e.clone();
            for v in &mut e.values {
                *v = v.max(floor);
            }
            GaussianLogDensity::new(mu.clone(), e)
        })
        .collect();
    let log_w: Vec<f64> = model.weights.iter().map(|w| w.ln()).collect();

    // flips[i][j] = estimated P(i -> j)
    let mut flips = vec![vec![0.0; k]; k];
    let mut x = vec![0.0; p];
    for i in 0..k {
        let mut rng = rng_from_seed(derive_seed(seed, i as u64));
        let sd: Vec<f64> = eigs[i].values.iter().map(|v| v.max(0.0).sqrt()).collect();
        let mut counts = vec![0.0; k];
        for _ in 0..n_mc {
            x.copy_from_slice(&model.centroids[i]);
            for (s, v) in sd.iter().zip(&eigs[i].vectors) {
                let z: f64 = StandardNormal.sample(&mut rng);
                for (xa, va) in x.iter_mut().zip(v) {
                    *xa += s * z * va;
                }
            }
            let own = log_w[i] + densities[i].log_density(&x);
            for j in (0..k).filter(|&j| j != i) {
                let other = log_w[j] + densities[j].log_density(&x);
                if other > own {
                    counts[j] += 1.0;
                } else if other == own {
                    counts[j] += 0.5;
                }
            }
        }
        for j in 0..k {
            flips[i][j] = counts[j] / n_mc as f64;
        }
    }
    let w = &model.weights;
    Ok(Dissimilarity::from_fn(k, Metric::DempMc, |i, j| {
        let overlap = w[i] * flips[i][j] + w[j] * flips[j][i];
        (1.0 - overlap).max(0.0)
    }))
}

/// Builds the requested dissimilarity for a fitted model.
pub fn dissimilarity(model: &ClusterModel, metric: Metric, n_mc: usize, seed: u64) -> Result<Dissimilarity> {
    match metric {
        Metric::EuclideanCentroid => Ok(centroid_dissimilarity(model)),
        Metric::DempMc => demp_dissimilarity(model, n_mc, seed),
    }
}

/// Agglomerative merging on a stored matrix.
///
/// Each step merges the active pair with the smallest current
/// dissimilarity; ties go to the lexicographically smallest pair of node
/// ids. The merged cluster takes the lower slot, so `left` is the node in
/// the lower slot.
pub fn linkage_merge(d: &Dissimilarity, linkage: Linkage) -> Dendrogram {
    let k = d.k();
    let mut dist: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| d.get(i, j)).collect()).collect();
    let mut node: Vec<usize> = (0..k).collect();
    let mut size = vec![1usize; k];
    let mut active = vec![true; k];
    let mut merges = Vec::with_capacity(k.saturating_sub(1));

    for step in 0..k.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for a in (0..k).filter(|&a| active[a]) {
            for b in ((a + 1)..k).filter(|&b| active[b]) {
                let key = (dist[a][b], node[a].min(node[b]), node[a].max(node[b]));
                let better = match best {
                    None => true,
                    Some((bd, lo, hi, _, _)) => {
                        key.0 < bd || (key.0 == bd && (key.1, key.2) < (lo, hi))
                    }
                };
                if better {
                    best = Some((key.0, key.1, key.2, a, b));
                }
            }
        }
        let (height, _, _, a, b) = best.expect("at least two active clusters");
        let new_node = k + step;
        merges.push(Merge { left: node[a], right: node[b], height, node: new_node });

        for x in (0..k).filter(|&x| active[x] && x != a && x != b) {
            let updated = match linkage {
                Linkage::Single => dist[a][x].min(dist[b][x]),
                Linkage::Complete => dist[a][x].max(dist[b][x]),
                Linkage::Average => {
                    (size[a] as f64 * dist[a][x] + size[b] as f64 * dist[b][x]) / (size[a] + size[b]) as f64
                }
            };
            dist[a][x] = updated;
            dist[x][a] = updated;
        }
        active[b] = false;
        size[a] += size[b];
        node[a] = new_node;
    }
    Dendrogram { merges, leaf_count: k, linkage }
}

/// Cuts a dendrogram into `big_k` groups by undoing its last `big_k - 1`
/// merges. Groups are numbered from 1 in order of their smallest leaf.
pub fn cut_tree(dend: &Dendrogram, big_k: usize) -> Result<Vec<usize>> {
    let k = dend.leaf_count;
    if big_k == 0 || big_k > k {
        return Err(Error::KOutOfRange { k: big_k, max: k });
    }
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    // leaf representative of every node id
    let mut rep: Vec<usize> = (0..k).collect();
    for m in &dend.merges[..k - big_k] {
        let a = find(&mut parent, rep[m.left]);
        let b = find(&mut parent, rep[m.right]);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        parent[hi] = lo;
        debug_assert_eq!(rep.len(), m.node);
        rep.push(lo);
    }
    let mut group_of_root = vec![0usize; k];
    let mut next = 0;
    let mut groups = Vec::with_capacity(k);
    for leaf in 0..k {
        let root = find(&mut parent, leaf);
        if group_of_root[root] == 0 {
            next += 1;
            group_of_root[root] = next;
        }
        groups.push(group_of_root[root]);
    }
    Ok(groups)
}

/// Merges components and cuts the tree at `big_k` groups.
pub fn merge_components(d: &Dissimilarity, linkage: Linkage, big_k: usize) -> Result<MergeResult> {
    let dendrogram = linkage_merge(d, linkage);
    let component_to_group = cut_tree(&dendrogram, big_k)?;
    Ok(MergeResult { dendrogram, component_to_group })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CovarianceKind, SymMatrix};
    use approx::assert_relative_eq;

    fn model(centroids: Vec<Vec<f64>>) -> ClusterModel {
        let k = centroids.len();
        let p = centroids[0].len();
        ClusterModel {
            centroids,
            covariances: vec![SymMatrix::scaled_identity(p, 1.0); k],
            sizes: vec![1; k],
            weights: vec![1.0 / k as f64; k],
            covariance_kind: CovarianceKind::ScaledIdentity,
        }
    }

    fn three() -> Dissimilarity {
        Dissimilarity::new(3, vec![0.0, 1.0, 5.0, 1.0, 0.0, 4.0, 5.0, 4.0, 0.0], Metric::EuclideanCentroid).unwrap()
    }

    #[test]
    fn three_four_five() {
        let d = centroid_dissimilarity(&model(vec![vec![0.0, 0.0], vec![3.0, 4.0]]));
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(1, 0), 5.0);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn identical_centroids_give_zero_matrix() {
        let d = centroid_dissimilarity(&model(vec![vec![1.0, 2.0]; 3]));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn right_triangle() {
        let d = centroid_dissimilarity(&model(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]]));
        assert_eq!(d.get(0, 1), 1.0);
        assert_eq!(d.get(0, 2), 2.0);
        assert_relative_eq!(d.get(1, 2), 5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn single_linkage_example() {
        let dend = linkage_merge(&three(), Linkage::Single);
        assert_eq!(
            dend.merges,
            vec![
                Merge { left: 0, right: 1, height: 1.0, node: 3 },
                Merge { left: 3, right: 2, height: 4.0, node: 4 },
            ]
        );
        assert_eq!(dend.to_merge_list(), "0 1 1\n3 2 4\n");
    }

    #[test]
    fn complete_and_average_linkage() {
        assert_eq!(linkage_merge(&three(), Linkage::Complete).merges[1].height, 5.0);
        assert_eq!(linkage_merge(&three(), Linkage::Average).merges[1].height, 4.5);
    }

    #[test]
    fn cuts() {
        let dend = linkage_merge(&three(), Linkage::Single);
        assert_eq!(cut_tree(&dend, 3).unwrap(), vec![1, 2, 3]);
        assert_eq!(cut_tree(&dend, 1).unwrap(), vec![1, 1, 1]);
        assert_eq!(cut_tree(&dend, 2).unwrap(), vec![1, 1, 2]);
        assert_eq!(cut_tree(&dend, 4), Err(Error::KOutOfRange { k: 4, max: 3 }));
        assert_eq!(cut_tree(&dend, 0), Err(Error::KOutOfRange { k: 0, max: 3 }));
    }

    #[test]
    fn ties_merge_smallest_ids_first() {
        let d = Dissimilarity::from_fn(4, Metric::EuclideanCentroid, |_, _| 1.0);
        let dend = linkage_merge(&d, Linkage::Single);
        assert_eq!((dend.merges[0].left, dend.merges[0].right), (0, 1));
        assert_eq!((dend.merges[1].left, dend.merges[1].right), (2, 3));
    }

    #[test]
    fn single_leaf() {
        let d = Dissimilarity::from_fn(1, Metric::EuclideanCentroid, |_, _| 0.0);
        let dend = linkage_merge(&d, Linkage::Single);
        assert!(dend.merges.is_empty());
        assert_eq!(cut_tree(&dend, 1).unwrap(), vec![1]);
    }

    #[test]
    fn demp_identical_vs_disjoint() {
        let same = demp_dissimilarity(&model(vec![vec![0.0, 0.0], vec![0.0, 0.0]]), 5000, 1).unwrap();
        let apart = demp_dissimilarity(&model(vec![vec![0.0, 0.0], vec![100.0, 0.0]]), 5000, 1).unwrap();
        assert_relative_eq!(same.get(0, 1), 0.5, epsilon = 1e-12);
        assert!(same.get(0, 1) < apart.get(0, 1) - 0.3);
        assert!(apart.get(0, 1) >= 1.0 - 1e-3);
        assert_eq!(apart.get(1, 1), 0.0);
    }

    #[test]
    fn demp_is_seed_deterministic() {
        let m = model(vec![vec![0.0, 0.0], vec![1.5, 0.0], vec![0.0, 2.0]]);
        assert_eq!(demp_dissimilarity(&m, 2000, 5).unwrap(), demp_dissimilarity(&m, 2000, 5).unwrap());
        assert!(demp_dissimilarity(&m, 10, 5).is_err());
    }

    #[test]
    fn demp_rejects_indefinite_covariance() {
        let mut m = model(vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        m.covariances[1] = SymMatrix::from_row_major(2, vec![1.0, 2.0, 2.0, 1.0]);
        assert_eq!(demp_dissimilarity(&m, 1000, 0), Err(Error::NonPsdCovariance(1)));
    }
}
