use serde::Serialize;

use super::{christoffel, ChartMetric};
use crate::error::{GeomError, Result};
use crate::numerics::linalg::axpy;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicPath {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
}

impl GeodesicPath {
    pub fn end(&self) -> &[f64] {
        self.points.last().expect("a path has at least its start point")
    }

    /// Metric speed `|ẋ|_g` at every node.
    pub fn speeds(&self, m: &ChartMetric) -> Result<Vec<f64>> {
        self.points
            .iter()
            .zip(&self.velocities)
            .map(|(x, v)| m.metric(x).map(|g| g.inner(v, v).sqrt()))
            .collect()
    }
}

fn acceleration(m: &ChartMetric, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    if !m.in_domain(x) {
        return Err(GeomError::DomainExit { at: x.to_vec() });
    }
    let gamma = christoffel(m, x).map_err(|e| match e {
        GeomError::Domain { .. } => GeomError::DomainExit { at: x.to_vec() },
        other => other,
    })?;
    Ok(gamma.contract(v, v).into_iter().map(|a| -a).collect())
}

/// Integrates `ẍᵏ + Γᵏᵢⱼ ẋⁱ ẋʲ = 0` with classical RK4 over `[0, t_end]`.
pub fn geodesic(m: &ChartMetric, x0: &[f64], v0: &[f64], t_end: f64, steps: usize) -> Result<GeodesicPath> {
    if steps == 0 || x0.len() != m.dim() || v0.len() != m.dim() {
        return Err(GeomError::Precondition("geodesic needs matching dimensions and at least one step".into()));
    }
    let dt = t_end / steps as f64;
    let mut path = GeodesicPath { times: vec![0.0], points: vec![x0.to_vec()], velocities: vec![v0.to_vec()] };
    let (mut x, mut v) = (x0.to_vec(), v0.to_vec());
    for s in 0..steps {
        let a1 = acceleration(m, &x, &v)?;
        let (x2, v2) = (axpy(0.5 * dt, &v, &x), axpy(0.5 * dt, &a1, &v));
        let a2 = acceleration(m, &x2, &v2)?;
        let (x3, v3) = (axpy(0.5 * dt, &v2, &x), axpy(0.5 * dt, &a2, &v));
        let a3 = acceleration(m, &x3, &v3)?;
        let (x4, v4) = (axpy(dt, &v3, &x), axpy(dt, &a3, &v));
        let a4 = acceleration(m, &x4, &v4)?;
        for i in 0..x.len() {
            x[i] += dt / 6.0 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
            v[i] += dt / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
        }
        if !m.in_domain(&x) {
            return Err(GeomError::DomainExit { at: x });
        }
        path.times.push(dt * (s + 1) as f64);
        path.points.push(x.clone());
        path.velocities.push(v.clone());
    }
    Ok(path)
}
