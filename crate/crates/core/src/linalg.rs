//! Small dense helpers. Eigen-decompositions are delegated to nalgebra.

use nalgebra::DMatrix;

use crate::model::SymMatrix;

#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Eigen-decomposition of a symmetric matrix. `vectors[l]` is the unit
/// eigenvector paired with `values[l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl SymEigen {
    pub fn new(m: &SymMatrix) -> Self {
        let p = m.dim();
        // symmetrize so round-off asymmetry cannot leak into the solver
        let mat = DMatrix::from_fn(p, p, |i, j| 0.5 * (m.get(i, j) + m.get(j, i)));
        let eig = mat.symmetric_eigen();
        let values = eig.eigenvalues.iter().copied().collect();
        let vectors = (0..p).map(|l| eig.eigenvectors.column(l).iter().copied().collect()).collect();
        Self { values, vectors }
    }

    /// `V diag(values) V^T`, exactly symmetric.
    pub fn recompose(&self) -> SymMatrix {
        let p = self.vectors.len();
        let mut out = SymMatrix::zeros(p);
        for i in 0..p {
            for j in 0..=i {
                let v: f64 = self
                    .values
                    .iter()
                    .zip(&self.vectors)
                    .map(|(lam, vec)| lam * vec[i] * vec[j])
                    .sum();
                out.set(i, j, v);
                out.set(j, i, v);
            }
        }
        out
    }
}

/// Gaussian log-density evaluator built from an eigen-decomposition with
/// strictly positive eigenvalues.
#[derive(Debug, Clone)]
pub struct GaussianLogDensity {
    mean: Vec<f64>,
    eig: SymEigen,
    inv_values: Vec<f64>,
    log_norm: f64,
}

impl GaussianLogDensity {
    pub fn new(mean: Vec<f64>, eig: SymEigen) -> Self {
        let p = mean.len() as f64;
        let log_det: f64 = eig.values.iter().map(|v| v.ln()).sum();
        let log_norm = -0.5 * (p * (2.0 * std::f64::consts::PI).ln() + log_det);
        let inv_values = eig.values.iter().map(|v| 1.0 / v).collect();
        Self { mean, eig, inv_values, log_norm }
    }

    pub fn log_density(&self, x: &[f64]) -> f64 {
        let mut maha = 0.0;
        if let ([x0, x1], [m0, m1]) = (x, self.mean.as_slice()) {
            let (d0, d1) = (x0 - m0, x1 - m1);
            for (inv, v) in self.inv_values.iter().zip(&self.eig.vectors) {
                let proj = d0 * v[0] + d1 * v[1];
                maha += proj * proj * inv;
            }
            return self.log_norm - 0.5 * maha;
        }
        for (inv, v) in self.inv_values.iter().zip(&self.eig.vectors) {
            let proj: f64 = x.iter().zip(&self.mean).zip(v).map(|((xi, mi), vi)| (xi - mi) * vi).sum();
            maha += proj * proj * inv;
        }
        self.log_norm - 0.5 * maha
    }
}
