use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use super::spline::CubicSpline;
use super::{closed_form, Jet, ProfileEval, Representation, SmoothFunction1D};
use crate::error::{GeomError, Result};
use crate::numerics::integrate;

pub const DEFAULT_CONVOLUTION_GRID: usize = 4096;

/// Unnormalized bump `exp(−1/(1 − u²))` and its first three derivatives in `u`.
fn bump(u: f64) -> [f64; 4] {
    if u.abs() >= 1.0 {
        return [0.0; 4];
    }
    let q = 1.0 - u * u;
    let b = (-1.0 / q).exp();
    let s1 = -2.0 * u / (q * q);
    let s1p = -2.0 / (q * q) - 8.0 * u * u / (q * q * q);
    let s1pp = -24.0 * u / (q * q * q) - 48.0 * u * u * u / (q * q * q * q);
    [b, b * s1, b * (s1 * s1 + s1p), b * (s1 * s1 * s1 + 3.0 * s1 * s1p + s1pp)]
}

fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| integrate(|u| Ok(bump(u)[0]), -1.0, 1.0, 1e-15).expect("bump integral converges"))
}

fn mollifier_jet(delta: f64, x: f64) -> Jet {
    let c = 1.0 / bump_mass();
    let [b0, b1, b2, b3] = bump(x / delta);
    Jet::new(c * b0 / delta, c * b1 / delta.powi(2), c * b2 / delta.powi(3), c * b3 / delta.powi(4))
}

/// Even, nonnegative, `C^∞` bump supported on `[−δ, δ]` with unit integral.
pub fn mollifier(delta: f64) -> Result<SmoothFunction1D> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(GeomError::Precondition(format!("mollifier width must be positive, got {delta}")));
    }
    Ok(closed_form(
        &format!("mollifier:{delta}"),
        (f64::NEG_INFINITY, f64::INFINITY),
        false,
        move |x| mollifier_jet(delta, x),
        None,
    ))
}

struct SplineSampled {
    value: CubicSpline,
    d1: CubicSpline,
    d2: CubicSpline,
}

impl ProfileEval for SplineSampled {
    fn jet(&self, r: f64) -> Jet {
        let [d2, d3, _] = self.d2.eval(r);
        Jet::new(self.value.eval(r)[0], self.d1.eval(r)[0], d2, d3)
    }
}

/// Samples `f * ω_δ` and its first two derivatives (as `f * ω_δ'`, `f * ω_δ''`)
/// on `grid` points of the δ-shrunk domain of `f` and spline-interpolates each
/// channel. The third derivative is the derivative of the second-derivative
/// spline.
pub fn convolve(f: &SmoothFunction1D, delta: f64, grid: usize) -> Result<SmoothFunction1D> {
    if !(delta > 0.0) {
        return Err(GeomError::Precondition(format!("mollifier width must be positive, got {delta}")));
    }
    if grid < 3 {
        return Err(GeomError::Precondition("convolution grid needs at least 3 points".into()));
    }
    let (a, b) = f.domain();
    let (lo, hi) = (a + delta, b - delta);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(GeomError::Precondition(format!(
            "cannot convolve on domain {:?} with width {delta}",
            f.domain()
        )));
    }
    let step = (hi - lo) / (grid - 1) as f64;
    let samples: Result<Vec<[f64; 3]>> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let x = lo + step * i as f64;
            let mut out = [0.0; 3];
            for (k, slot) in out.iter_mut().enumerate() {
                let tol = 1e-13 / delta.powi(k as i32);
                *slot = integrate(|t| Ok(f.value(x - t)? * mollifier_jet(delta, t).channel(k)), -delta, delta, tol)?;
            }
            Ok(out)
        })
        .collect();
    let samples = samples?;
    let channel = |k: usize| CubicSpline::new(lo, step, samples.iter().map(|s| s[k]).collect());
    Ok(SmoothFunction1D::new(
        format!("{}*mollifier:{delta}", f.name()),
        (lo, hi),
        false,
        Representation::SplineSampled,
        Arc::new(SplineSampled { value: channel(0), d1: channel(1), d2: channel(2) }),
    ))
}
