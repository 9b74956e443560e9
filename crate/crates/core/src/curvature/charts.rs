//! Reference charts with known geometry.

use super::ChartMetric;
use crate::numerics::SymMatrix;

pub fn euclidean(dim: usize) -> ChartMetric {
    ChartMetric::new(format!("euclidean-{dim}"), dim, move |_| Ok(SymMatrix::identity(dim)))
}

/// Conformal factor `λ(p) = 2ρ/(1 + |p|²)` of the stereographic chart of the
/// radius-`ρ` sphere.
pub fn stereographic_factor(rho: f64, p: &[f64]) -> f64 {
    2.0 * rho / (1.0 + p.iter().map(|x| x * x).sum::<f64>())
}

/// Round sphere of radius `rho` in stereographic coordinates, `g = λ² I`.
pub fn round_sphere(dim: usize, rho: f64) -> ChartMetric {
    ChartMetric::new(format!("sphere-{dim}-{rho}"), dim, move |p| {
        let l = stereographic_factor(rho, p);
        Ok(SymMatrix::identity(dim).scaled(l * l))
    })
}

/// Closed-form Christoffel symbols `Γᵏᵢⱼ` of [`round_sphere`].
pub fn round_sphere_christoffel(p: &[f64], k: usize, i: usize, j: usize) -> f64 {
    let s = 1.0 + p.iter().map(|x| x * x).sum::<f64>();
    let dl = |a: usize| -2.0 * p[a] / s;
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    delta(k, i) * dl(j) + delta(k, j) * dl(i) - delta(i, j) * dl(k)
}

/// Flat plane in the polar-style chart `g = diag(1, x₀²)`, `x₀ > 0`.
pub fn polar_plane() -> ChartMetric {
    ChartMetric::new("polar-plane", 2, |x| Ok(SymMatrix::diagonal(&[1.0, x[0] * x[0]]))).with_domain(|x| x[0] > 0.0)
}
