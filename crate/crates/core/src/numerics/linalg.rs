use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Dense symmetric matrix. Only the upper triangle is stored; `get(i, j)` and
/// `get(j, i)` read the same slot, so symmetry holds exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    upper: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, upper: vec![0.0; dim * (dim + 1) / 2] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Builds the matrix from `f(i, j)` evaluated for `i <= j`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut upper = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in i..dim {
                upper.push(f(i, j));
            }
        }
        Self { dim, upper }
    }

    /// Wraps a row-major upper triangle as produced by [`SymMatrix::as_slice`].
    pub fn from_upper(dim: usize, upper: Vec<f64>) -> Self {
        assert_eq!(upper.len(), dim * (dim + 1) / 2);
        Self { dim, upper }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { 0.0 })
    }

    /// Symmetrizes an arbitrary square matrix as `(M + Mᵀ)/2`.
    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.dim - i * (i + 1) / 2 + j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.slot(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.upper[s] = v;
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// Bilinear form `xᵀ S y`.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += x[i] * self.get(i, j) * y[j];
            }
        }
        s
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { dim: self.dim, upper: self.upper.iter().map(|v| v * s).collect() }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &SymMatrix, b: f64) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            upper: self.upper.iter().zip(&other.upper).map(|(x, y)| a * x + b * y).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        self.upper.iter().zip(&other.upper).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.iter().map(|a| a.abs()).fold(0.0, f64::max)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|v| v.is_finite())
    }

    pub fn inverse(&self) -> Option<SymMatrix> {
        let inv = self.to_dmatrix().try_inverse()?;
        Some(SymMatrix::from_dmatrix(&inv))
    }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn sym_eig_min(s: &SymMatrix) -> f64 {
    s.to_dmatrix().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

/// All eigenvalues in ascending order.
pub fn sym_eigenvalues(s: &SymMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = s.to_dmatrix().symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| alpha * a + b).collect()
}

pub fn scale(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|a| alpha * a).collect()
}

/// Orthonormalizes `vectors` with respect to the inner product `g` (modified
/// Gram–Schmidt). Vectors whose residual norm falls below `tol` are dropped.
pub fn gram_schmidt(g: &SymMatrix, vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let c = g.inner(&w, u);
                w = axpy(-c, u, &w);
            }
        }
        let n = g.inner(&w, &w).max(0.0).sqrt();
        if n > tol {
            out.push(scale(1.0 / n, &w));
        }
    }
    out
}

/// Least-squares solution of `A X = B` via SVD.
pub fn least_squares(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let svd = a.clone().svd(true, true);
    svd.solve(b, 1e-14).ok()
}

pub fn dvec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eig_min_examples() {
        assert!((sym_eig_min(&SymMatrix::identity(3)) - 1.0).abs() < 1e-14);
        assert!((sym_eig_min(&SymMatrix::diagonal(&[2.0, -1.0])) + 1.0).abs() < 1e-14);
        let m = SymMatrix::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        assert!((sym_eig_min(&m) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_storage_is_exact() {
        let m = SymMatrix::from_fn(4, |i, j| (i * 7 + j) as f64 * 0.1);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
        let dm = DMatrix::from_fn(3, 3, |i, j| (i as f64) - 2.0 * j as f64);
        let s = SymMatrix::from_dmatrix(&dm);
        assert_eq!(s.get(0, 2), s.get(2, 0));
    }

    #[test]
    fn gram_schmidt_respects_metric() {
        let g = SymMatrix::diagonal(&[4.0, 1.0, 9.0]);
        let basis = gram_schmidt(&g, &[vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 2.0]], 1e-12);
        assert_eq!(basis.len(), 3);
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g.inner(u, v) - want).abs() < 1e-12);
            }
        }
    }
}
