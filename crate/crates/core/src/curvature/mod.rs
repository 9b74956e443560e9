//! Finite-difference curvature oracle for metrics given in a coordinate chart.

pub mod charts;
mod geodesic;
mod scan;

use std::fmt;
use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::numerics::{fd_directional, FdPolicy, SymMatrix};

pub use geodesic::{geodesic, GeodesicPath};
pub use scan::{merge_reports, min_sectional_scan, refine_plane, CurvatureReport, ScanConfig};

type MetricFn = dyn Fn(&[f64]) -> Result<SymMatrix> + Send + Sync;
type DomainFn = dyn Fn(&[f64]) -> bool + Send + Sync;

/// A Riemannian metric `x ↦ g_ij(x)` on an open subset of `ℝᵈ`.
#[derive(Clone)]
pub struct ChartMetric {
    name: String,
    dim: usize,
    eval: Arc<MetricFn>,
    domain: Arc<DomainFn>,
    policy: FdPolicy,
}

impl fmt::Debug for ChartMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartMetric").field("name", &self.name).field("dim", &self.dim).finish()
    }
}

impl ChartMetric {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        eval: impl Fn(&[f64]) -> Result<SymMatrix> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dim,
            eval: Arc::new(eval),
            domain: Arc::new(|_| true),
            policy: FdPolicy::default(),
        }
    }

    pub fn with_domain(mut self, domain: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.domain = Arc::new(domain);
        self
    }

    pub fn with_policy(mut self, policy: FdPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn policy(&self) -> FdPolicy {
        self.policy
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.dim && (self.domain)(x)
    }

    pub fn metric(&self, x: &[f64]) -> Result<SymMatrix> {
        if !self.in_domain(x) {
            return Err(GeomError::Domain { at: x.to_vec(), reason: format!("outside the chart of {}", self.name) });
        }
        let g = (self.eval)(x)?;
        if g.dim() != self.dim || !g.is_finite() {
            return Err(GeomError::NonFinite { at: x.to_vec() });
        }
        Ok(g)
    }

    /// `∂_l g` for each coordinate direction `l`.
    fn metric_derivatives(&self, x: &[f64]) -> Result<Vec<SymMatrix>> {
        (0..self.dim)
            .map(|l| {
                let e = unit(self.dim, l);
                let flat = fd_directional(|p| self.metric(p).map(|g| g.as_slice().to_vec()), x, &e, self.policy)?;
                Ok(SymMatrix::from_upper(self.dim, flat))
            })
            .collect()
    }
}

fn unit(dim: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[i] = 1.0;
    e
}

/// Christoffel symbols `Γᵏᵢⱼ`, stored with the upper index first.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `Γᵏᵢⱼ uⁱ wʲ`.
    pub fn contract(&self, u: &[f64], w: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|k| {
                let mut acc = 0.0;
                for i in 0..d {
                    for j in 0..d {
                        acc += self.get(k, i, j) * u[i] * w[j];
                    }
                }
                acc
            })
            .collect()
    }
}

pub fn christoffel(m: &ChartMetric, x: &[f64]) -> Result<Christoffel> {
    let d = m.dim();
    let g = m.metric(x)?;
    let ginv = g.inverse().ok_or_else(|| GeomError::SingularMetric { at: x.to_vec() })?;
    let dg = m.metric_derivatives(x)?;
    // lowered: Γ_{l,ij} = ½ (∂_j g_il + ∂_i g_jl − ∂_l g_ij)
    let mut lowered = vec![0.0; d * d * d];
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                lowered[(l * d + i) * d + j] = 0.5 * (dg[j].get(i, l) + dg[i].get(j, l) - dg[l].get(i, j));
            }
        }
    }
    let mut data = vec![0.0; d * d * d];
    for k in 0..d {
        for i in 0..d {
            for j in i..d {
                let v: f64 = (0..d).map(|l| ginv.get(k, l) * lowered[(l * d + i) * d + j]).sum();
                data[(k * d + i) * d + j] = v;
                data[(k * d + j) * d + i] = v;
            }
        }
    }
    Ok(Christoffel { dim: d, data })
}

/// Fully covariant curvature tensor `R(a, b, c, e) = g(R(∂_a, ∂_b)∂_c, ∂_e)`
/// with `R(X, Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y]`, so that `R(X, Y, Y, X)` is
/// positive on round spheres.
#[derive(Debug, Clone, PartialEq)]
pub struct Riemann {
    dim: usize,
    data: Vec<f64>,
}

impl Riemann {
    pub fn get(&self, a: usize, b: usize, c: usize, e: usize) -> f64 {
        let d = self.dim;
        self.data[((a * d + b) * d + c) * d + e]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `R(x, y, z, w)` for vectors.
    pub fn eval(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for a in 0..d {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..d {
                if y[b] == 0.0 {
                    continue;
                }
                let xy = x[a] * y[b];
                for c in 0..d {
                    let base = ((a * d + b) * d + c) * d;
                    let row: f64 = (0..d).map(|e| self.data[base + e] * w[e]).sum();
                    acc += xy * z[c] * row;
                }
            }
        }
        acc
    }

    /// Covector `v ↦ R(v, y, y, x) + R(x, y, y, v)`, the gradient of
    /// `x ↦ R(x, y, y, x)`.
    pub fn grad_first(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|a| {
                let e = unit(d, a);
                self.eval(&e, y, y, x) + self.eval(x, y, y, &e)
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn riemann(m: &ChartMetric, x: &[f64]) -> Result<Riemann> {
    let d = m.dim();
    let g = m.metric(x)?;
    let gamma = christoffel(m, x)?;
    // dgamma[j] = ∂_j Γ
    let dgamma: Vec<Vec<f64>> = (0..d)
        .map(|j| fd_directional(|p| christoffel(m, p).map(|c| c.data), x, &unit(d, j), m.policy()))
        .collect::<Result<_>>()?;
    let dg = |j: usize, l: usize, i: usize, k: usize| dgamma[j][(l * d + i) * d + k];
    // R^l_{ijk} = ∂_j Γ^l_ik − ∂_k Γ^l_ij + Γ^l_jα Γ^α_ik − Γ^l_kα Γ^α_ij = component of R(∂_j, ∂_k)∂_i
    let mut up = vec![0.0; d * d * d * d];
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut v = dg(j, l, i, k) - dg(k, l, i, j);
                    for a in 0..d {
                        v += gamma.get(l, j, a) * gamma.get(a, i, k) - gamma.get(l, k, a) * gamma.get(a, i, j);
                    }
                    up[((l * d + i) * d + j) * d + k] = v;
                }
            }
        }
    }
    let mut data = vec![0.0; d * d * d * d];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    data[((a * d + b) * d + c) * d + e] =
                        (0..d).map(|l| g.get(e, l) * up[((l * d + c) * d + a) * d + b]).sum();
                }
            }
        }
    }
    Ok(Riemann { dim: d, data })
}

/// `V(X, Y) = |X|²|Y|² − (X, Y)²`.
pub fn area_form(g: &SymMatrix, x: &[f64], y: &[f64]) -> f64 {
    let xy = g.inner(x, y);
    g.inner(x, x) * g.inner(y, y) - xy * xy
}

/// Sectional curvature of the plane spanned by `x`, `y` from a precomputed tensor.
pub fn sectional_from(rm: &Riemann, g: &SymMatrix, x: &[f64], y: &[f64]) -> Result<f64> {
    let v = area_form(g, x, y);
    if !(v > 1e-10) {
        return Err(GeomError::DegeneratePlane { area: v });
    }
    Ok(rm.eval(x, y, y, x) / v)
}

pub fn sectional(m: &ChartMetric, x: &[f64], u: &[f64], w: &[f64]) -> Result<f64> {
    let g = m.metric(x)?;
    let rm = riemann(m, x)?;
    sectional_from(&rm, &g, u, w)
}
