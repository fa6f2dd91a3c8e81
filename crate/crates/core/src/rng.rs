//! Seeding utilities shared by the fitters and generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::sq_dist;
use crate::model::DataMatrix;
use crate::trimmed_kmeans::keep_lowest;

pub type StdRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> StdRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent child seed for stream `stream` of `base`.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(stream))
}

/// k-means++ seeding over the full data: the first centre uniformly, the
/// rest with probability proportional to the squared distance to the
/// nearest chosen centre. Only the `h` points closest to the current
/// centres are eligible, so with `h < n` isolated outliers are not drawn
/// just for being far away; `h = n` is plain k-means++.
/// Returns row indices into `data`.
pub fn kmeanspp_indices(data: &DataMatrix, k: usize, h: usize, rng: &mut StdRng) -> Vec<usize> {
    let n = data.n();
    let mut chosen = Vec::with_capacity(k);
    chosen.push(rng.random_range(0..n));
    let mut best: Vec<f64> = data.rows().map(|x| sq_dist(x, data.row(chosen[0]))).collect();
    while chosen.len() < k {
        let weights: Vec<f64> = if h < n {
            let keep = keep_lowest(&best, h.max(1));
            best.iter().zip(&keep).map(|(&d, &kp)| if kp { d } else { 0.0 }).collect()
        } else {
            best.clone()
        };
        let total: f64 = weights.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in weights.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            // guard against round-off landing on a zero-weight tail
            while weights[pick] == 0.0 && pick > 0 {
                pick -= 1;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        chosen.push(next);
        let c = data.row(next);
        for (i, x) in data.rows().enumerate() {
            let d = sq_dist(x, c);
            if d < best[i] {
                best[i] = d;
            }
        }
    }
    chosen
}

/// Maps `f` over `0..n_starts`, in parallel when the `parallel`
/// feature is on. Results keep index order.
pub(crate) fn par_map<T, F>(n_starts: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n_starts).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_starts).map(f).collect()
    }
}
