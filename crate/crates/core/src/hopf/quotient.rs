use serde::Serialize;

use super::{horizontal_part, hopf_map, Fibration};
use crate::curvature::{charts, sectional, ChartMetric};
use crate::error::{GeomError, Result};
use crate::numerics::linalg::{dot, norm};
use crate::numerics::{fd_directional, integrate, FdPolicy, Quaternion, SymMatrix};

/// Stereographic coordinates of a unit vector, projecting from the pole
/// with last coordinate −1.
pub fn to_stereo(p: &[f64]) -> Vec<f64> {
    let (w, t) = p.split_at(p.len() - 1);
    w.iter().map(|c| c / (1.0 + t[0])).collect()
}

pub fn from_stereo(y: &[f64]) -> Vec<f64> {
    let s = dot(y, y);
    let mut p: Vec<f64> = y.iter().map(|c| 2.0 * c / (1.0 + s)).collect();
    p.push((1.0 - s) / (1.0 + s));
    p
}

fn stereo_differential(p: &[f64], u: &[f64]) -> Vec<f64> {
    let m = p.len() - 1;
    let t = p[m];
    (0..m).map(|i| (u[i] * (1.0 + t) - p[i] * u[m]) / ((1.0 + t) * (1.0 + t))).collect()
}

/// Local section of `f` over the unit target sphere minus its south pole:
/// `q₁ = √((1 + t)/2)` real, `q₂ = w / (2 q₁)`.
pub fn section(fb: Fibration, p: &[f64]) -> Result<Vec<f64>> {
    let d = fb.scalar_dim();
    if p.len() != d + 1 {
        return Err(GeomError::Precondition(format!("target point must have {} coordinates", d + 1)));
    }
    let t = p[d];
    if !(t > -1.0 + 1e-12) {
        return Err(GeomError::Domain { at: p.to_vec(), reason: "the section is undefined at the south pole".into() });
    }
    let q1 = ((1.0 + t) / 2.0).sqrt();
    let mut w = [0.0; 4];
    w[..d].copy_from_slice(&p[..d]);
    let q2 = Quaternion::from_slice(&w).scale(1.0 / (2.0 * q1));
    Ok(fb.join(Quaternion::new(q1, 0.0, 0.0, 0.0), q2))
}

/// Radius of the stereographic disc on which the quotient chart is offered.
const CHART_RADIUS: f64 = 3.0;

/// The quotient metric on the target sphere in stereographic coordinates:
/// chart vectors are lifted through [`section`], made horizontal, and
/// measured in the ambient metric.
pub fn quotient_metric_chart(fb: Fibration) -> ChartMetric {
    let m = fb.scalar_dim();
    let lift_policy = FdPolicy::default();
    ChartMetric::new(format!("hopf-quotient-{}", fb.ambient_dim() - 1), m, move |y| {
        let lift = |z: &[f64]| section(fb, &from_stereo(z));
        let x = lift(y)?;
        let mut cols = Vec::with_capacity(m);
        for i in 0..m {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            let v = fd_directional(lift, y, &e, lift_policy)?;
            cols.push(horizontal_part(fb, &x, &v)?);
        }
        Ok(SymMatrix::from_fn(m, |i, j| dot(&cols[i], &cols[j])))
    })
    .with_domain(|y| dot(y, y) < CHART_RADIUS * CHART_RADIUS)
}

/// Quotient-metric length of `f ∘ c` over `[a, b]` for a curve `c` on the
/// unit sphere, measured through horizontal parts of `c'`.
pub fn projected_length(
    fb: Fibration,
    curve: impl Fn(f64) -> Vec<f64>,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64> {
    let policy = FdPolicy::default();
    integrate(
        |s| {
            let x = curve(s);
            let v = crate::numerics::fd_vec_derivative(|h| Ok(curve(s + h)), policy)?;
            Ok(norm(&horizontal_part(fb, &x, &v)?))
        },
        a,
        b,
        tol,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OneillSample {
    pub ambient: f64,
    pub quotient: f64,
}

/// Sectional curvature of the unit sphere on the horizontal plane
/// `span(u, v)` at `x`, next to that of the quotient on its image.
pub fn oneill_pair(fb: Fibration, x: &[f64], u: &[f64], v: &[f64]) -> Result<OneillSample> {
    let ambient_chart = charts::round_sphere(fb.ambient_dim() - 1, 1.0);
    let ambient = sectional(&ambient_chart, &to_stereo(x), &stereo_differential(x, u), &stereo_differential(x, v))?;
    let fx = hopf_map(fb, x);
    let policy = FdPolicy::default();
    let push = |w: &[f64]| -> Result<Vec<f64>> {
        let df = fd_directional(|z| Ok(hopf_map(fb, z)), x, w, policy)?;
        Ok(stereo_differential(&fx, &df))
    };
    let quotient = sectional(&quotient_metric_chart(fb), &to_stereo(&fx), &push(u)?, &push(v)?)?;
    Ok(OneillSample { ambient, quotient })
}
