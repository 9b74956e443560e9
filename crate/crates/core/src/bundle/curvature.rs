use nalgebra::DMatrix;
use serde::Serialize;

use super::{forms::v_form, forms::w_form, mat_vec, ModelBundle, TotalVector};
use crate::curvature::{christoffel, riemann, ChartMetric};
use crate::error::{GeomError, Result};
use crate::numerics::linalg::{dot, gram_schmidt, norm};
use crate::numerics::{fd_vec_derivative, SymMatrix};

/// `E = a ∂r + A + X` at a regular point.
struct Decomposed {
    a: f64,
    vertical: Vec<f64>,
    base: Vec<f64>,
}

impl ModelBundle {
    fn decompose(&self, p: &[f64], v: &[f64], e: &TotalVector) -> Decomposed {
        let r = norm(v);
        let turned = self.vertical_projection(p, v, &e.base);
        let u: Vec<f64> = e.fiber.iter().zip(&turned).map(|(w, t)| w + t).collect();
        let a = dot(&u, v) / r;
        let vertical = u.iter().zip(v).map(|(ui, vi)| ui - a * vi / r).collect();
        Decomposed { a, vertical, base: e.base.clone() }
    }

    fn vertical_coords(&self, w: &[f64]) -> Vec<f64> {
        TotalVector::vertical(w.to_vec(), self.n).coords()
    }

    fn lift_coords(&self, p: &[f64], v: &[f64], x: &[f64]) -> Vec<f64> {
        self.basic_lift(p, v, x).coords()
    }
}

/// Householder reflection sending the last basis vector to `unit`.
fn reflection_to(unit: &[f64]) -> DMatrix<f64> {
    let k = unit.len();
    let mut n = -DMatrix::from_column_slice(k, 1, unit);
    n[(k - 1, 0)] += 1.0;
    let nn = n.norm_squared();
    if nn < 1e-24 {
        return DMatrix::identity(k, k);
    }
    DMatrix::identity(k, k) - (&n * n.transpose()) * (2.0 / nn)
}

/// Induced metric on the radial fiber `{r = t}` through `(p, v)`, in the chart
/// `(p', u) ↦ (p', t·Rot·(2u, 1 − |u|²)/(1 + |u|²))` centred at `u = 0 ↦ v`.
fn radial_fiber_chart(b: &ModelBundle, v: &[f64]) -> (ChartMetric, DMatrix<f64>, f64) {
    let (n, k) = (b.n, b.k);
    let t = norm(v);
    let unit: Vec<f64> = v.iter().map(|x| x / t).collect();
    let rot = reflection_to(&unit);
    let bundle = b.clone();
    let rot_c = rot.clone();
    let chart = ChartMetric::new("radial-fiber", n + k - 1, move |x| {
        let (p, u) = x.split_at(n);
        let d = 1.0 + dot(u, u);
        let mut s = vec![0.0; k];
        for i in 0..k - 1 {
            s[i] = 2.0 * u[i] / d;
        }
        s[k - 1] = (1.0 - dot(u, u)) / d;
        let fiber = mat_vec(&rot_c, &s).iter().map(|c| t * c).collect::<Vec<_>>();
        let g = bundle.total_metric(p, &fiber)?.to_dmatrix();
        // ∂s/∂u
        let mut ds = DMatrix::zeros(k, k - 1);
        for j in 0..k - 1 {
            for i in 0..k - 1 {
                ds[(i, j)] = if i == j { 2.0 / d } else { 0.0 } - 4.0 * u[i] * u[j] / (d * d);
            }
            ds[(k - 1, j)] = -4.0 * u[j] / (d * d);
        }
        let mut jac = DMatrix::zeros(n + k, n + k - 1);
        for i in 0..n {
            jac[(i, i)] = 1.0;
        }
        let fiber_jac = &rot_c * ds * t;
        jac.view_mut((n, n), (k, k - 1)).copy_from(&fiber_jac);
        Ok(SymMatrix::from_dmatrix(&(jac.transpose() * g * jac)))
    })
    .with_policy(b.policy);
    (chart, rot, t)
}

/// Sectional curvature of the plane spanned by `e`, `f` at the regular point
/// `(p, v)`, assembled from the radial, mixed and radial-fiber terms. `R̄` is
/// taken from the oracle on the induced metric of the radial fiber.
pub fn curvature_regular(b: &ModelBundle, p: &[f64], v: &[f64], e: &TotalVector, f: &TotalVector) -> Result<f64> {
    let r = norm(v);
    if !(r > 0.0) {
        return Err(GeomError::Precondition("curvature_regular needs v ≠ 0".into()));
    }
    let g = b.total_metric(p, v)?;
    let basis = gram_schmidt(&g, &[e.coords(), f.coords()], 1e-10);
    if basis.len() < 2 {
        return Err(GeomError::DegeneratePlane { area: v_form(&g, &e.coords(), &f.coords()) });
    }
    let e = TotalVector::from_coords(&basis[0], b.n);
    let f = TotalVector::from_coords(&basis[1], b.n);
    let de = b.decompose(p, v, &e);
    let df = b.decompose(p, v, &f);

    let jet = b.profile.jet(r)?;
    let gp = jet.d1 / jet.value;
    let gpp = jet.d2 / jet.value;
    let shrink = 1.0 - b.l * r * r;
    let lr = b.l * r / shrink;

    let av = b.vertical_coords(&de.vertical);
    let bv = b.vertical_coords(&df.vertical);
    let xv = b.lift_coords(p, v, &de.base);
    let yv = b.lift_coords(p, v, &df.base);

    let c: Vec<f64> = (0..b.k).map(|i| de.a * df.vertical[i] - df.a * de.vertical[i]).collect();
    let cv = b.vertical_coords(&c);
    let z_base: Vec<f64> = (0..b.n).map(|i| de.a * df.base[i] - df.a * de.base[i]).collect();
    let zv = b.lift_coords(p, v, &z_base);

    let radial = -gpp * g.inner(&cv, &cv) + (b.l / shrink + lr * lr) * g.inner(&zv, &zv);

    let bracket = b.bracket_vertical_along(p, v, &de.base, &df.base)?;
    let mixed = 3.0 * (lr + gp) * g.inner(&cv, &b.vertical_coords(&bracket));

    let (chart, rot, t) = radial_fiber_chart(b, v);
    let to_chart = |fiber_part: &[f64], base: &[f64]| -> Vec<f64> {
        let w = mat_vec(&rot.transpose(), fiber_part);
        let mut out = base.to_vec();
        out.extend(w[..b.k - 1].iter().map(|c| c / (2.0 * t)));
        out
    };
    let fiber_of = |vert: &[f64], base: &[f64]| -> Vec<f64> {
        let turned = b.vertical_projection(p, v, base);
        vert.iter().zip(&turned).map(|(a, q)| a - q).collect()
    };
    let pc = to_chart(&fiber_of(&de.vertical, &de.base), &de.base);
    let qc = to_chart(&fiber_of(&df.vertical, &df.base), &df.base);
    let mut centre = p.to_vec();
    centre.extend(std::iter::repeat_n(0.0, b.k - 1));
    let rbar = riemann(&chart, &centre)?.eval(&pc, &qc, &qc, &pc);
    let fiber_term = rbar - gp * gp * v_form(&g, &av, &bv) - lr * lr * v_form(&g, &xv, &yv)
        + gp * lr * w_form(&g, &av, &bv, &xv, &yv);

    Ok(radial + mixed + fiber_term)
}

/// `R(E, F, F, E)` at `(p, 0)` for `E = A + X`, `F = B + Y`:
/// `R(X,Y,Y,X) − G'''(0) V(A,B) + L W(A,B;X,Y) + 3 (B, ∇_A[X,Y])`.
pub fn curvature_at_n(b: &ModelBundle, p: &[f64], a: &[f64], bb: &[f64], x: &[f64], y: &[f64]) -> Result<f64> {
    let zero = vec![0.0; b.k];
    let g = b.total_metric(p, &zero)?;
    let point = [p, &zero[..]].concat();
    let xv = TotalVector::new(x.to_vec(), zero.clone()).coords();
    let yv = TotalVector::new(y.to_vec(), zero.clone()).coords();
    let av = b.vertical_coords(a);
    let bv = b.vertical_coords(bb);
    let base = riemann(&b.total_chart(), &point)?.eval(&xv, &yv, &yv, &xv);
    let d3 = b.profile.third_derivative_at_zero()?;
    let along = fd_vec_derivative(
        |s| {
            let vs: Vec<f64> = a.iter().map(|c| s * c).collect();
            let w = b.bracket_vertical_along(p, &vs, x, y)?;
            let gs = b.total_metric(p, &vs)?;
            Ok(vec![gs.inner(&bv, &b.vertical_coords(&w))])
        },
        b.policy,
    )?[0];
    Ok(base - d3 * v_form(&g, &av, &bv) + b.l * w_form(&g, &av, &bv, &xv, &yv) + 3.0 * along)
}

/// Oracle value of `R(E, F, F, E)` on the zero section, extrapolated from the
/// points `(p, sA)` with `s = 0.02, 0.01, 0.005`.
pub fn curvature_at_n_oracle(b: &ModelBundle, p: &[f64], a: &[f64], bb: &[f64], x: &[f64], y: &[f64]) -> Result<f64> {
    let e = TotalVector::new(x.to_vec(), a.to_vec()).coords();
    let f = TotalVector::new(y.to_vec(), bb.to_vec()).coords();
    let chart = b.total_chart();
    let at = |s: f64| -> Result<f64> {
        let point: Vec<f64> = p.iter().copied().chain(a.iter().map(|c| s * c)).collect();
        Ok(riemann(&chart, &point)?.eval(&e, &f, &f, &e))
    };
    if norm(a) == 0.0 {
        return at(0.0);
    }
    let s = [0.02, 0.01, 0.005];
    let vals = [at(s[0])?, at(s[1])?, at(s[2])?];
    // quadratic through the three samples, evaluated at 0
    let mut acc = 0.0;
    for i in 0..3 {
        let mut w = 1.0;
        for j in 0..3 {
            if i != j {
                w *= s[j] / (s[j] - s[i]);
            }
        }
        acc += w * vals[i];
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    /// The rotation field `v ↦ S v` with `S = w v̂ᵀ − v̂ wᵀ`.
    Vertical(Vec<f64>),
    /// The basic lift of a constant base vector.
    Basic(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialDerivativeReport {
    pub expected_ratio: f64,
    pub measured_ratio: f64,
    /// `(D F/∂r, ∂r)`
    pub radial_component: f64,
    /// `|D F/∂r − ratio·F| / |F|`
    pub residual: f64,
}

/// Covariant derivative of a field along `∂r`, computed from the oracle's
/// Christoffel symbols, against the expected multiple `g'/g` (vertical) or
/// `−Lr/(1 − Lr²)` (basic).
pub fn radial_derivative_check(b: &ModelBundle, p: &[f64], v: &[f64], field: &FieldKind) -> Result<RadialDerivativeReport> {
    let r = norm(v);
    if !(r > 0.0) {
        return Err(GeomError::Precondition("radial derivative needs v ≠ 0".into()));
    }
    let unit: Vec<f64> = v.iter().map(|c| c / r).collect();
    let point = [p, v].concat();
    let g = b.total_metric(p, v)?;
    let gamma = christoffel(&b.total_chart(), &point)?;
    let dr = b.vertical_coords(&unit);
    let (field_vec, derivative, expected) = match field {
        FieldKind::Vertical(w) => {
            let k = b.k;
            let s = DMatrix::from_fn(k, k, |i, j| w[i] * unit[j] - unit[i] * w[j]);
            let jet = b.profile.jet(r)?;
            (b.vertical_coords(&mat_vec(&s, v)), b.vertical_coords(&mat_vec(&s, &unit)), jet.d1 / jet.value)
        }
        FieldKind::Basic(x) => {
            let q = b.connection_along(p, x);
            let turned: Vec<f64> = mat_vec(&q, &unit).iter().map(|c| -c).collect();
            (b.lift_coords(p, v, x), b.vertical_coords(&turned), -b.l * r / (1.0 - b.l * r * r))
        }
    };
    let transport = gamma.contract(&dr, &field_vec);
    let cov: Vec<f64> = derivative.iter().zip(&transport).map(|(d, t)| d + t).collect();
    let ff = g.inner(&field_vec, &field_vec);
    let ratio = g.inner(&cov, &field_vec) / ff;
    let diff: Vec<f64> = cov.iter().zip(&field_vec).map(|(c, f)| c - ratio * f).collect();
    Ok(RadialDerivativeReport {
        expected_ratio: expected,
        measured_ratio: ratio,
        radial_component: g.inner(&cov, &dr),
        residual: (g.inner(&diff, &diff) / ff).sqrt(),
    })
}
