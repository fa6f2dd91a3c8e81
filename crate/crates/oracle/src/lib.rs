//! Deliberately naive reference implementations. Everything here works on
//! plain slices and favours obviousness over speed; the test suites compare
//! the optimised library against these.

/// Sn consistency constant.
pub const SN_CONSTANT: f64 = 1.1926;

/// Two labelings describe the same partition up to renaming of labels.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len()
        && (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
}

/// Adjusted Rand index by enumerating every pair of items.
pub fn ari_by_pairs(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let (mut both, mut in_a, mut in_b, mut pairs) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let sa = a[i] == a[j];
            let sb = b[i] == b[j];
            pairs += 1.0;
            if sa && sb {
                both += 1.0;
            }
            if sa {
                in_a += 1.0;
            }
            if sb {
                in_b += 1.0;
            }
        }
    }
    if pairs == 0.0 {
        return 1.0;
    }
    let expected = in_a * in_b / pairs;
    let max = 0.5 * (in_a + in_b);
    if max == expected {
        return if same_partition(a, b) { 1.0 } else { 0.0 };
    }
    (both - expected) / (max - expected)
}

/// Sn scale estimator straight from its definition: for every `i` the
/// `(floor(n/2)+1)`-th smallest of `|x_i - x_j|` over all `j`, then the
/// `floor((n+1)/2)`-th smallest of those, times [`SN_CONSTANT`].
pub fn sn_by_double_loop(x: &[f64]) -> f64 {
    let n = x.len();
    let mut outer = Vec::with_capacity(n);
    for i in 0..n {
        let mut d: Vec<f64> = (0..n).map(|j| (x[i] - x[j]).abs()).collect();
        d.sort_by(f64::total_cmp);
        outer.push(d[n / 2]);
    }
    outer.sort_by(f64::total_cmp);
    SN_CONSTANT * outer[(n + 1) / 2 - 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linkage {
    Single,
    Complete,
    Average,
}

/// One agglomeration step: node ids of the merged clusters (the cluster
/// holding the smaller leaf first), the height, and the new node id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub node: usize,
}

/// Agglomerative clustering recomputing every cluster-to-cluster distance
/// from the leaf distances at every step. Ties go to the pair with the
/// smallest `(min node id, max node id)`.
pub fn naive_linkage(d: &[Vec<f64>], linkage: Linkage) -> Vec<Step> {
    let k = d.len();
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..k).map(|i| (i, vec![i])).collect();
    let mut steps = Vec::new();
    let between = |a: &[usize], b: &[usize]| -> f64 {
        let vals = a.iter().flat_map(|&i| b.iter().map(move |&j| d[i][j]));
        match linkage {
            Linkage::Single => vals.fold(f64::INFINITY, f64::min),
            Linkage::Complete => vals.fold(f64::NEG_INFINITY, f64::max),
            Linkage::Average => vals.sum::<f64>() / (a.len() * b.len()) as f64,
        }
    };
    while clusters.len() > 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for x in 0..clusters.len() {
            for y in 0..clusters.len() {
                if x == y {
                    continue;
                }
                let h = between(&clusters[x].1, &clusters[y].1);
                let (lo, hi) = (clusters[x].0.min(clusters[y].0), clusters[x].0.max(clusters[y].0));
                let better = match best {
                    None => true,
                    Some((bh, blo, bhi, _, _)) => h < bh || (h == bh && (lo, hi) < (blo, bhi)),
                };
                if better {
                    best = Some((h, lo, hi, x, y));
                }
            }
        }
        let (height, _, _, x, y) = best.unwrap();
        let min_leaf = |c: &(usize, Vec<usize>)| *c.1.iter().min().unwrap();
        let (first, second) = if min_leaf(&clusters[x]) < min_leaf(&clusters[y]) { (x, y) } else { (y, x) };
        let node = k + steps.len();
        steps.push(Step { left: clusters[first].0, right: clusters[second].0, height, node });
        let mut leaves = clusters[first].1.clone();
        leaves.extend(&clusters[second].1);
        let (hi_idx, lo_idx) = (first.max(second), first.min(second));
        clusters.remove(hi_idx);
        clusters.remove(lo_idx);
        clusters.push((node, leaves));
    }
    steps
}

/// Weighted truncation objective `sum_j w_j sum_l (ln t + d/t)`,
/// `t = clamp(d, m, r m)`.
pub fn truncation_objective(eigs: &[Vec<f64>], sizes: &[f64], r: f64, m: f64) -> f64 {
    eigs.iter()
        .zip(sizes)
        .map(|(e, &w)| {
            w * e
                .iter()
                .map(|&d| {
                    let t = d.clamp(m, r * m);
                    t.ln() + d / t
                })
                .sum::<f64>()
        })
        .sum()
}

fn truncation_slope(eigs: &[Vec<f64>], sizes: &[f64], r: f64, m: f64) -> f64 {
    let mut g = 0.0;
    for (e, &w) in eigs.iter().zip(sizes) {
        for &d in e {
            if d < m {
                g += w * (1.0 / m - d / (m * m));
            } else if d > r * m {
                g += w * (1.0 / m - d / (r * m * m));
            }
        }
    }
    g
}

/// Best common scale `m` for eigenvalue truncation, found by evaluating
/// every breakpoint (`d` and `d/r`), bisecting the sign of the slope inside
/// every interval between breakpoints, and scanning a dense log grid.
pub fn brute_force_scale(eigs: &[Vec<f64>], sizes: &[f64], r: f64) -> f64 {
    let mut cuts: Vec<f64> = eigs.iter().flatten().flat_map(|&d| [d, d / r]).filter(|&v| v > 0.0).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let lo = cuts[0] * 1e-3;
    let hi = cuts[cuts.len() - 1] * 1e3;
    let mut candidates = cuts.clone();
    let mut edges = vec![lo];
    edges.extend(&cuts);
    edges.push(hi);
    for w in edges.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        if truncation_slope(eigs, sizes, r, a * (1.0 + 1e-12)) >= 0.0 || truncation_slope(eigs, sizes, r, b * (1.0 - 1e-12)) <= 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if truncation_slope(eigs, sizes, r, mid) < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        candidates.push(0.5 * (a + b));
    }
    let steps = 20_000;
    for s in 0..=steps {
        candidates.push(lo * (hi / lo).powf(s as f64 / steps as f64));
    }
    candidates
        .into_iter()
        .min_by(|&x, &y| truncation_objective(eigs, sizes, r, x).total_cmp(&truncation_objective(eigs, sizes, r, y)))
        .unwrap()
}

/// Truncated eigenvalues at the brute-force scale.
pub fn brute_force_restrict(eigs: &[Vec<f64>], sizes: &[f64], r: f64) -> Vec<Vec<f64>> {
    let m = brute_force_scale(eigs, sizes, r);
    eigs.iter().map(|e| e.iter().map(|&d| d.clamp(m, r * m)).collect()).collect()
}

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn means(rows: &[Vec<f64>], labels: &[usize], k: usize) -> Option<Vec<Vec<f64>>> {
    let p = rows[0].len();
    let mut sums = vec![vec![0.0; p]; k];
    let mut counts = vec![0usize; k];
    for (x, &l) in rows.iter().zip(labels) {
        if l > 0 {
            counts[l - 1] += 1;
            for (s, v) in sums[l - 1].iter_mut().zip(x) {
                *s += v;
            }
        }
    }
    if counts.contains(&0) {
        return None;
    }
    Some(sums.into_iter().zip(counts).map(|(s, c)| s.into_iter().map(|v| v / c as f64).collect()).collect())
}

/// Trimmed SSE of a labelling (`0` = trimmed), `None` if a cluster is empty.
pub fn trimmed_sse(rows: &[Vec<f64>], labels: &[usize], k: usize) -> Option<f64> {
    let m = means(rows, labels, k)?;
    Some(rows.iter().zip(labels).filter(|(_, &l)| l > 0).map(|(x, &l)| sq(x, &m[l - 1])).sum())
}

/// Minimum trimmed SSE over every labelling in `{0..=k}^n` that keeps
/// exactly `h` points and leaves no cluster empty, with all labellings
/// attaining it (up to 1e-12 relative).
pub fn exhaustive_tkmeans(rows: &[Vec<f64>], k: usize, h: usize) -> (f64, Vec<Vec<usize>>) {
    let n = rows.len();
    let total = (k + 1).pow(n as u32);
    let mut best = f64::INFINITY;
    let mut all: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut labels = vec![0usize; n];
    for code in 0..total {
        let mut c = code;
        for l in labels.iter_mut() {
            *l = c % (k + 1);
            c /= k + 1;
        }
        if labels.iter().filter(|&&l| l > 0).count() != h {
            continue;
        }
        if let Some(sse) = trimmed_sse(rows, &labels, k) {
            best = best.min(sse);
            all.push((sse, labels.clone()));
        }
    }
    let tol = 1e-12 * best.abs().max(1e-300);
    let winners = all.into_iter().filter(|(s, _)| *s <= best + tol).map(|(_, l)| l).collect();
    (best, winners)
}

/// Plain Lloyd iterations from the given centres until labels stop
/// changing. Returns the SSE and labels `1..=k`.
pub fn lloyd(rows: &[Vec<f64>], mut centres: Vec<Vec<f64>>) -> (f64, Vec<usize>) {
    let k = centres.len();
    let mut labels = vec![0usize; rows.len()];
    loop {
        let next: Vec<usize> = rows
            .iter()
            .map(|x| {
                let mut best = (0, f64::INFINITY);
                for (j, c) in centres.iter().enumerate() {
                    let d = sq(x, c);
                    if d < best.1 {
                        best = (j, d);
                    }
                }
                best.0 + 1
            })
            .collect();
        if next == labels {
            break;
        }
        labels = next;
        match means(rows, &labels, k) {
            Some(m) => centres = m,
            None => return (f64::INFINITY, labels),
        }
    }
    let sse = rows.iter().zip(&labels).map(|(x, &l)| sq(x, &centres[l - 1])).sum();
    (sse, labels)
}

/// Best Lloyd solution over every choice of `k` distinct data points as
/// starting centres.
pub fn lloyd_from_all_seeds(rows: &[Vec<f64>], k: usize) -> (f64, Vec<usize>) {
    fn combos(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            combos(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    combos(rows.len(), k, 0, &mut Vec::new(), &mut all);
    all.into_iter()
        .map(|idx| lloyd(rows, idx.iter().map(|&i| rows[i].clone()).collect()))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap()
}
