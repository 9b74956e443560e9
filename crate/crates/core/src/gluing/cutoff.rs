use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::numerics::fd_directional;
use crate::numerics::sampling::{rng_for, uniform, unit_vec};
use crate::numerics::FdPolicy;

/// `(f, f', f'')` of the smooth step that is 1 on `(−∞, 1]` and 0 on
/// `[2, ∞)`, glued from `exp(−1/t)` pieces.
pub fn smooth_step_jet(y: f64) -> [f64; 3] {
    if y <= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    if y >= 2.0 {
        return [0.0, 0.0, 0.0];
    }
    let (a, b) = (y - 1.0, 2.0 - y);
    // f = 1 / (1 + e^u)
    let u = -1.0 / a + 1.0 / b;
    let du = 1.0 / (a * a) + 1.0 / (b * b);
    let ddu = -2.0 / (a * a * a) + 2.0 / (b * b * b);
    let f = 1.0 / (1.0 + u.exp());
    let g = 1.0 / ((1.0 + u.exp()) * (1.0 + (-u).exp()));
    if g == 0.0 {
        return [f, 0.0, 0.0];
    }
    let d1 = -g * du;
    let d2 = -((1.0 - 2.0 * f) * d1 * du + g * ddu);
    [f, d1, d2]
}

/// `N = max(sup |f'|, sup |f''|)` over a fine grid of `[1, 2]`.
pub fn step_bound() -> f64 {
    static N: OnceLock<f64> = OnceLock::new();
    *N.get_or_init(|| {
        let steps = 200_000;
        (0..=steps)
            .map(|i| {
                let [_, d1, d2] = smooth_step_jet(1.0 + i as f64 / steps as f64);
                d1.abs().max(d2.abs())
            })
            .fold(0.0, f64::max)
    })
}

/// `φ(x) = f(x^λ / δ)`: equal to 1 below `δ₁`, to 0 above `δ₂ = ε`, with
/// `|xφ'|, |x²φ''| ≤ ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cutoff {
    pub eps: f64,
    pub n_bound: f64,
    pub lambda: f64,
    pub delta: f64,
    /// May underflow to 0 for small `ε`; `ln_delta1` stays exact.
    pub delta1: f64,
    pub ln_delta1: f64,
    pub delta2: f64,
}

impl Cutoff {
    fn argument(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (self.lambda * x.ln()).exp() / self.delta
        }
    }

    pub fn phi(&self, x: f64) -> f64 {
        smooth_step_jet(self.argument(x))[0]
    }

    /// `(φ, xφ', x²φ'')`, finite for every `x > 0`.
    pub fn scaled_jet(&self, x: f64) -> [f64; 3] {
        let y = self.argument(x);
        let [f, d1, d2] = smooth_step_jet(y);
        let ly = self.lambda * y;
        [f, d1 * ly, d2 * ly * ly + d1 * (self.lambda - 1.0) * ly]
    }

    /// `(φ, φ', φ'')` at `x > 0`; overflows once `x²` underflows.
    pub fn jet(&self, x: f64) -> [f64; 3] {
        let [f, d1, d2] = self.scaled_jet(x);
        [f, d1 / x, d2 / (x * x)]
    }
}

pub fn build_cutoff(eps: f64) -> Result<Cutoff> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(GeomError::Precondition(format!("ε must be positive, got {eps}")));
    }
    let n = step_bound();
    let lambda = ((-1.0 + (1.0 + 2.0 * eps / n).sqrt()) / 2.0).min(0.5);
    let delta = eps.powf(lambda) / 2.0;
    let ln_delta1 = delta.ln() / lambda;
    let c = Cutoff { eps, n_bound: n, lambda, delta, delta1: ln_delta1.exp(), ln_delta1, delta2: eps };
    verify(&c)?;
    Ok(c)
}

fn verify(c: &Cutoff) -> Result<()> {
    let (lo, hi) = (c.ln_delta1 - 1.0, (2.0 * c.eps).ln());
    let steps = 20_000;
    for i in 0..=steps {
        let x = (lo + (hi - lo) * i as f64 / steps as f64).exp();
        let [f, d1, d2] = c.scaled_jet(x);
        let bad = if !(0.0..=1.0).contains(&f) {
            Some("0 ≤ φ ≤ 1")
        } else if d1.abs() > c.eps {
            Some("|xφ'| ≤ ε")
        } else if d2.abs() > c.eps {
            Some("|x²φ''| ≤ ε")
        } else if x.ln() <= c.ln_delta1 && f != 1.0 {
            Some("φ = 1 below δ₁")
        } else if x >= c.delta2 && f != 0.0 {
            Some("φ = 0 above δ₂")
        } else {
            None
        };
        if let Some(cond) = bad {
            return Err(GeomError::Infeasible(format!("cutoff for ε = {} fails {cond} at x = {x} ({f}, {d1}, {d2})", c.eps)));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialCutoffReport {
    pub dimension: usize,
    pub samples: usize,
    pub eps: f64,
    /// `sup |x|·|∇ψ(x)|`
    pub gradient_term: f64,
    /// `sup |x|²·max_ij |∂ᵢ∂ⱼψ(x)|`
    pub hessian_term: f64,
    pub passed: bool,
}

/// Below `e^-300` the FD Hessian of `ψ` no longer fits in an `f64`.
const RADIAL_CHECK_MIN_LN: f64 = -300.0;

/// FD check of the bounds on `ψ(x) = φ(|x|)` in `ℝⁿ`, sampling `|x|`
/// log-uniformly across the transition of `φ`.
pub fn radial_cutoff_check(c: &Cutoff, n: usize, samples: usize, seed: u64) -> Result<RadialCutoffReport> {
    if n == 0 {
        return Err(GeomError::Precondition("dimension must be at least 1".into()));
    }
    let psi = |x: &[f64]| -> Result<Vec<f64>> { Ok(vec![c.phi(crate::numerics::linalg::norm(x))]) };
    let (lo, hi) = ((c.ln_delta1 - 0.5).max(RADIAL_CHECK_MIN_LN), (2.0 * c.eps).ln());
    let mut rng = rng_for(seed, 0);
    let (mut grad_term, mut hess_term) = (0.0_f64, 0.0_f64);
    for _ in 0..samples {
        let r = uniform(&mut rng, lo, hi).exp();
        let x: Vec<f64> = unit_vec(&mut rng, n).iter().map(|u| u * r).collect();
        let policy = FdPolicy::new(1e-3 * r, 2)?;
        let grad = |x: &[f64]| -> Result<Vec<f64>> {
            (0..n)
                .map(|i| {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    fd_directional(psi, x, &e, policy).map(|d| d[0])
                })
                .collect()
        };
        let g = grad(&x)?;
        grad_term = grad_term.max(r * crate::numerics::linalg::norm(&g));
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = fd_directional(grad, &x, &e, policy)?;
            for v in col {
                hess_term = hess_term.max(r * r * v.abs());
            }
        }
    }
    let passed = grad_term <= c.eps + 1e-6 && hess_term <= 2.0 * c.eps + 1e-5;
    Ok(RadialCutoffReport { dimension: n, samples, eps: c.eps, gradient_term: grad_term, hessian_term: hess_term, passed })
}
