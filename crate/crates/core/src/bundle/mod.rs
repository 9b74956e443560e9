//! Model vector-bundle metrics over a base chart: a rotationally symmetric
//! fiber metric built from a warp profile, a connection `Q`, and the
//! base-shrinking term `−L r² π*g_N`.

mod curvature;
mod forms;
mod presets;
mod select;

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::conic::fiber_tensor;
use crate::curvature::ChartMetric;
use crate::error::{GeomError, Result};
use crate::numerics::linalg::dot;
use crate::numerics::{fd_directional, FdPolicy, SymMatrix};
use crate::smoothing::SmoothFunction1D;

pub use curvature::{
    curvature_at_n, curvature_at_n_oracle, curvature_regular, radial_derivative_check, FieldKind, RadialDerivativeReport,
};
pub use forms::{v_form, w_form};
pub use presets::{base_chart, connection_preset, BasePreset, BundleConfig, QPreset};
pub use select::{
    estimate_m1, extract_q, jet_defect_across, positivity_scan_family, select_l, ExtractedQ, FamilyScan, LSelection,
    M1Estimate, BASE_SAMPLE_RADIUS,
};

type ConnectionFn = dyn Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync;

/// Vector at a total-space point, split into base and fiber coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalVector {
    pub base: Vec<f64>,
    pub fiber: Vec<f64>,
}

impl TotalVector {
    pub fn new(base: Vec<f64>, fiber: Vec<f64>) -> Self {
        Self { base, fiber }
    }

    pub fn vertical(fiber: Vec<f64>, n: usize) -> Self {
        Self { base: vec![0.0; n], fiber }
    }

    pub fn coords(&self) -> Vec<f64> {
        let mut c = self.base.clone();
        c.extend_from_slice(&self.fiber);
        c
    }

    pub fn from_coords(c: &[f64], n: usize) -> Self {
        Self { base: c[..n].to_vec(), fiber: c[n..].to_vec() }
    }
}

#[derive(Clone)]
pub struct ModelBundle {
    pub n: usize,
    pub k: usize,
    pub base: ChartMetric,
    connection: Arc<ConnectionFn>,
    pub profile: SmoothFunction1D,
    pub l: f64,
    pub policy: FdPolicy,
}

impl fmt::Debug for ModelBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelBundle")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("base", &self.base.name())
            .field("profile", &self.profile.name())
            .field("L", &self.l)
            .finish()
    }
}

fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

impl ModelBundle {
    pub fn new(
        base: ChartMetric,
        k: usize,
        connection: impl Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync + 'static,
        profile: SmoothFunction1D,
        l: f64,
    ) -> Result<Self> {
        if k < 2 {
            return Err(GeomError::Precondition(format!("fiber rank must be at least 2, got {k}")));
        }
        if !(l >= 0.0 && l.is_finite()) {
            return Err(GeomError::Precondition(format!("L must be a nonnegative real, got {l}")));
        }
        Ok(Self { n: base.dim(), k, base, connection: Arc::new(connection), profile, l, policy: FdPolicy::default() })
    }

    /// Same bundle data with a different warp profile and constant.
    pub fn with_profile(&self, profile: SmoothFunction1D, l: f64) -> Self {
        Self { profile, l, ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.n + self.k
    }

    pub fn connection(&self, p: &[f64]) -> Vec<DMatrix<f64>> {
        (self.connection)(p)
    }

    /// `Q_p(x) = Σ xᵢ Qᵢ(p)`.
    pub fn connection_along(&self, p: &[f64], x: &[f64]) -> DMatrix<f64> {
        let qs = self.connection(p);
        let mut m = DMatrix::zeros(self.k, self.k);
        for (xi, q) in x.iter().zip(&qs) {
            m += q * *xi;
        }
        m
    }

    fn split<'a>(&self, point: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        point.split_at(self.n)
    }

    pub fn in_domain(&self, point: &[f64]) -> bool {
        if point.len() != self.dim() {
            return false;
        }
        let (p, v) = self.split(point);
        let r2 = dot(v, v);
        self.base.in_domain(p) && self.l * r2 < 1.0 && self.profile.contains(r2.sqrt())
    }

    pub fn total_metric(&self, p: &[f64], v: &[f64]) -> Result<SymMatrix> {
        let r2 = dot(v, v);
        if self.l * r2 >= 1.0 {
            return Err(GeomError::Domain {
                at: [p, v].concat(),
                reason: format!("L r² = {} is not below 1", self.l * r2),
            });
        }
        let gn = self.base.metric(p)?;
        let h = fiber_tensor(&self.profile, v)?;
        let turned: Vec<Vec<f64>> = self.connection(p).iter().map(|q| mat_vec(q, v)).collect();
        let h_turned: Vec<Vec<f64>> = turned.iter().map(|t| h.apply(t)).collect();
        let (n, shrink) = (self.n, 1.0 - self.l * r2);
        Ok(SymMatrix::from_fn(n + self.k, |i, j| match (i < n, j < n) {
            (true, true) => dot(&turned[i], &h_turned[j]) + shrink * gn.get(i, j),
            (true, false) => h_turned[i][j - n],
            (false, true) => h_turned[j][i - n],
            (false, false) => h.get(i - n, j - n),
        }))
    }

    pub fn metric_at(&self, point: &[f64]) -> Result<SymMatrix> {
        let (p, v) = self.split(point);
        self.total_metric(p, v)
    }

    pub fn total_chart(&self) -> ChartMetric {
        let me = self.clone();
        let dom = self.clone();
        ChartMetric::new(format!("bundle-{}", self.profile.name()), self.dim(), move |x| me.metric_at(x))
            .with_domain(move |x| dom.in_domain(x))
            .with_policy(self.policy)
    }

    /// Turn-field value `Q_p(x)·v`.
    pub fn vertical_projection(&self, p: &[f64], v: &[f64], x: &[f64]) -> Vec<f64> {
        mat_vec(&self.connection_along(p, x), v)
    }

    /// `(x, −Q_p(x)·v)`, the lift orthogonal to the fibers.
    pub fn basic_lift(&self, p: &[f64], v: &[f64], x: &[f64]) -> TotalVector {
        let t = self.vertical_projection(p, v, x);
        TotalVector::new(x.to_vec(), t.iter().map(|c| -c).collect())
    }

    /// `∂_j Q_i − ∂_i Q_j + [Q_j, Q_i]` at `p`, the operator with
    /// `[X̂ᵢ, X̂ⱼ] = (0, M·v)` for coordinate lifts.
    pub fn bracket_operator(&self, p: &[f64], i: usize, j: usize) -> Result<DMatrix<f64>> {
        let k = self.k;
        let qs = self.connection(p);
        let deriv = |a: usize, b: usize| -> Result<DMatrix<f64>> {
            // ∂_b Q_a
            let mut e = vec![0.0; self.n];
            e[b] = 1.0;
            let flat = fd_directional(|x| Ok(self.connection(x)[a].as_slice().to_vec()), p, &e, self.policy)?;
            Ok(DMatrix::from_column_slice(k, k, &flat))
        };
        Ok(deriv(i, j)? - deriv(j, i)? + &qs[j] * &qs[i] - &qs[i] * &qs[j])
    }

    /// Fiber part of `[X̂, Ŷ]` for constant-coefficient base fields `x`, `y`.
    pub fn bracket_vertical_along(&self, p: &[f64], v: &[f64], x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.k];
        for i in 0..self.n {
            for j in 0..self.n {
                let c = x[i] * y[j];
                if c == 0.0 || i == j {
                    continue;
                }
                let w = mat_vec(&self.bracket_operator(p, i, j)?, v);
                for (o, wi) in out.iter_mut().zip(w) {
                    *o += c * wi;
                }
            }
        }
        Ok(out)
    }

    pub fn bracket_vertical(&self, p: &[f64], v: &[f64], i: usize, j: usize) -> Result<Vec<f64>> {
        Ok(mat_vec(&self.bracket_operator(p, i, j)?, v))
    }

    /// Largest asymmetry `|Qᵢ + Qᵢᵀ|` of the connection at `p`.
    pub fn connection_asymmetry(&self, p: &[f64]) -> f64 {
        self.connection(p).iter().map(|q| (q + q.transpose()).amax()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests;
