use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Finite-difference settings: base step `h` and extrapolation order
/// (1 = plain central difference, 2 = one Richardson step on `h` and `h/2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdPolicy {
    pub h: f64,
    pub extrapolation: u8,
}

impl Default for FdPolicy {
    fn default() -> Self {
        Self { h: 1e-3, extrapolation: 2 }
    }
}

impl FdPolicy {
    pub fn new(h: f64, extrapolation: u8) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(GeomError::Precondition(format!("finite-difference step must be positive, got {h}")));
        }
        if !(1..=2).contains(&extrapolation) {
            return Err(GeomError::Precondition(format!("extrapolation order must be 1 or 2, got {extrapolation}")));
        }
        Ok(Self { h, extrapolation })
    }

    /// Largest offset from the expansion point touched by a first-derivative stencil.
    pub fn reach(&self) -> f64 {
        self.h
    }

    fn extrapolate<T>(&self, coarse: impl Fn(f64) -> Result<T>, combine: impl Fn(T, T) -> T) -> Result<T> {
        if self.extrapolation == 1 {
            coarse(self.h)
        } else {
            let a = coarse(self.h)?;
            let b = coarse(0.5 * self.h)?;
            Ok(combine(a, b))
        }
    }
}

fn checked(f: &impl Fn(f64) -> Result<f64>, x: f64) -> Result<f64> {
    let v = f(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(GeomError::NonFinite { at: vec![x] })
    }
}

/// Central-difference estimate of the `order`-th derivative of `f` at `x`.
pub fn fd_derivative(f: impl Fn(f64) -> Result<f64>, x: f64, order: u8, policy: FdPolicy) -> Result<f64> {
    let stencil = |h: f64| -> Result<f64> {
        match order {
            1 => Ok((checked(&f, x + h)? - checked(&f, x - h)?) / (2.0 * h)),
            2 => Ok((checked(&f, x + h)? - 2.0 * checked(&f, x)? + checked(&f, x - h)?) / (h * h)),
            3 => Ok((checked(&f, x + 2.0 * h)? - 2.0 * checked(&f, x + h)? + 2.0 * checked(&f, x - h)?
                - checked(&f, x - 2.0 * h)?)
                / (2.0 * h * h * h)),
            _ => Err(GeomError::Precondition(format!("derivative order {order} not supported"))),
        }
    };
    // every stencil above has truncation error O(h²)
    policy.extrapolate(stencil, |coarse, fine| (4.0 * fine - coarse) / 3.0)
}

/// First derivative at `t = 0` of a vector-valued function of one variable.
pub fn fd_vec_derivative(f: impl Fn(f64) -> Result<Vec<f64>>, policy: FdPolicy) -> Result<Vec<f64>> {
    let eval = |t: f64| -> Result<Vec<f64>> {
        let v = f(t)?;
        if v.iter().all(|x| x.is_finite()) {
            Ok(v)
        } else {
            Err(GeomError::NonFinite { at: vec![t] })
        }
    };
    let stencil = |h: f64| -> Result<Vec<f64>> {
        let p = eval(h)?;
        let m = eval(-h)?;
        Ok(p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect())
    };
    policy.extrapolate(stencil, |coarse, fine| {
        coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
    })
}

/// Directional derivative of a vector-valued function of a point along `dir`.
pub fn fd_directional(
    f: impl Fn(&[f64]) -> Result<Vec<f64>>,
    x: &[f64],
    dir: &[f64],
    policy: FdPolicy,
) -> Result<Vec<f64>> {
    fd_vec_derivative(
        |t| {
            let p: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a + t * d).collect();
            f(&p)
        },
        policy,
    )
}
