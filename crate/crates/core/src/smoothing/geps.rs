use std::sync::Arc;

use serde::Serialize;

use super::poly::{septic_step, triweight_bump, PiecewisePoly, Poly};
use super::{g0_jet, Jet, ProfileEval, Representation, SmoothFunction1D};
use crate::error::{GeomError, Result};

/// Breakpoints and spike parameters of the piecewise-polynomial `g_ε`.
///
/// On `[0, ε]` the second derivative is `g'' = −t·m(t) − β K(t)`, where
/// `m` steps 6 → 1 → 3 through septic smoothsteps across `[e1, e2]` and
/// `[e3, e4]`, and `K` is a unit-mass triweight bump of half-width `w`
/// centred at `c`. `β` and `c` are the unique values that land
/// `(g, g', g'')` on `g₀/2` at `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GEpsLayout {
    pub eps: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    pub spike_centre: f64,
    pub spike_half_width: f64,
    pub beta: f64,
}

fn step_between(lo: f64, hi: f64, len: f64) -> Poly {
    // lo + (hi - lo) S(s / len) in the local variable s
    septic_step().compose_affine(1.0 / len, 0.0).scale(hi - lo).add(&Poly::constant(lo))
}

impl GEpsLayout {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(GeomError::Precondition(format!("ε must lie in (0, 1/2), got {eps}")));
        }
        let (e1, e2, e3, e4) = (0.3 * eps, 0.5 * eps, 0.6 * eps, 0.9 * eps);
        let knots = [0.0, e1, e2, e3, e4, eps];
        let m = Self::m_pieces(&knots);
        // moments of d = m - 3 against t and t²
        let (mut first, mut second) = (0.0, 0.0);
        for (i, mi) in m.iter().enumerate() {
            let t = Poly::linear(knots[i], 1.0);
            let d = mi.add(&Poly::constant(-3.0));
            let len = knots[i + 1] - knots[i];
            first += t.mul(&d).integral_to(len);
            second += t.mul(&t).mul(&d).integral_to(len);
        }
        let beta = 0.5 - first;
        let m1 = -second;
        if !(beta > 0.0) {
            return Err(GeomError::Infeasible(format!("spike mass β = {beta} is not positive at ε = {eps}")));
        }
        let c = m1 / beta;
        if !(c > 0.0 && 1.5 * c < e1) {
            return Err(GeomError::Infeasible(format!(
                "spike centre {c} does not fit inside [0, {e1}) at ε = {eps}"
            )));
        }
        Ok(GEpsLayout { eps, e1, e2, e3, e4, spike_centre: c, spike_half_width: 0.5 * c, beta })
    }

    fn m_pieces(knots: &[f64; 6]) -> [Poly; 5] {
        [
            Poly::constant(6.0),
            step_between(6.0, 1.0, knots[2] - knots[1]),
            Poly::constant(1.0),
            step_between(1.0, 3.0, knots[4] - knots[3]),
            Poly::constant(3.0),
        ]
    }

    /// Piecewise second derivative of `D = g_ε − g₀` on `[0, ε]`.
    fn defect_second_derivative(&self) -> PiecewisePoly {
        let (c, w) = (self.spike_centre, self.spike_half_width);
        let base = [0.0, self.e1, self.e2, self.e3, self.e4, self.eps];
        let m = Self::m_pieces(&base);
        let mut knots = vec![0.0, c - w, c + w];
        knots.extend_from_slice(&base[1..]);
        let mut pieces = Vec::with_capacity(knots.len() - 1);
        for i in 0..knots.len() - 1 {
            let k = knots[i];
            let mi = if i < 3 { Poly::constant(6.0) } else { m[i - 2].clone() };
            let mut h = Poly::linear(k, 1.0).mul(&mi.add(&Poly::constant(-6.0))).scale(-1.0);
            if i == 1 {
                h = h.add(&triweight_bump().compose_affine(1.0 / w, -1.0).scale(-self.beta / w));
            }
            pieces.push(h);
        }
        PiecewisePoly { knots, pieces }
    }
}

/// Double antiderivative of a piecewise second derivative, starting from zero
/// value and slope at the first knot.
fn integrate_twice(h: &PiecewisePoly) -> PiecewisePoly {
    let (mut value, mut slope) = (0.0, 0.0);
    let mut pieces = Vec::with_capacity(h.pieces.len());
    for (i, hi) in h.pieces.iter().enumerate() {
        let len = h.knots[i + 1] - h.knots[i];
        let d1 = hi.antiderivative().add(&Poly::constant(slope));
        let d0 = d1.antiderivative().add(&Poly::constant(value));
        value = d0.eval(len);
        slope = d1.eval(len);
        pieces.push(d0);
    }
    PiecewisePoly { knots: h.knots.clone(), pieces }
}

struct GEps {
    eps: f64,
    defect: PiecewisePoly,
}

impl ProfileEval for GEps {
    fn jet(&self, r: f64) -> Jet {
        let g = g0_jet(r);
        if r >= self.eps {
            return Jet::new(g.value / 2.0, g.d1 / 2.0, g.d2 / 2.0, g.d3 / 2.0);
        }
        let [d0, d1, d2, d3] = self.defect.eval_jet(r);
        Jet::new(g.value + d0, g.d1 + d1, g.d2 + d2, g.d3 + d3)
    }

    fn tip_series(&self) -> Option<(f64, f64)> {
        Some((-6.0, 0.0))
    }

    fn tip_scale(&self) -> Option<f64> {
        Some(self.defect.knots[1])
    }

    fn exact_sphere_factor(&self, r: f64) -> Option<f64> {
        if r < self.defect.knots[1] {
            return Some(r * r - 2.0);
        }
        // e = g/r − 1
        let e = if r >= self.eps { -(1.0 + r * r) / 2.0 } else { -r * r + self.defect.eval_jet(r)[0] / r };
        Some((2.0 * e + e * e) / (r * r))
    }
}

/// The profile `g_ε` on `[0, 1/2)`: concave, `g'' ≤ −r`, `g' ≤ g₀'`,
/// equal to `g₀` near 0 and exactly `g₀/2` for `r ≥ ε`.
pub fn build_g_eps(eps: f64) -> Result<SmoothFunction1D> {
    let layout = GEpsLayout::new(eps)?;
    let defect = integrate_twice(&layout.defect_second_derivative());
    let [d0, d1, d2, _] = defect.eval_jet(eps);
    let g = g0_jet(eps);
    let mismatch = (d0 + g.value / 2.0).abs().max((d1 + g.d1 / 2.0).abs()).max((d2 + g.d2 / 2.0).abs());
    if mismatch > 1e-12 {
        return Err(GeomError::JetMismatch { at: vec![eps], defect: mismatch });
    }
    let eval = GEps { eps, defect };
    validate(&eval, eps)?;
    Ok(SmoothFunction1D::new(
        format!("geps:{eps}"),
        (0.0, 0.5),
        true,
        Representation::MollifiedPiecewise,
        Arc::new(eval),
    ))
}

fn validate(g: &GEps, eps: f64) -> Result<()> {
    let n = 20_000;
    let mut samples: Vec<f64> = (0..=n).map(|i| eps * i as f64 / n as f64).collect();
    samples.extend_from_slice(&g.defect.knots);
    for t in samples {
        let j = g.jet(t);
        let g0 = g0_jet(t);
        if j.d2 + t > 1e-12 {
            return Err(GeomError::Infeasible(format!("g'' ≤ −r fails at r = {t}: g'' = {}", j.d2)));
        }
        if j.d1 > g0.d1 + 1e-12 {
            return Err(GeomError::Infeasible(format!(
                "g' ≤ g₀' fails at r = {t}: g' = {}, g₀' = {}",
                j.d1, g0.d1
            )));
        }
        if j.value < 0.0 {
            return Err(GeomError::Infeasible(format!("g is negative at r = {t}")));
        }
    }
    Ok(())
}
