use std::fmt::Write;

use serde::Serialize;

use super::{g0_jet, SmoothFunction1D};
use crate::error::{GeomError, Result};

const SHAPE_GRID: usize = 2000;
const TIP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub condition: String,
    pub at: f64,
    pub magnitude: f64,
}

/// Verdicts for the tip normalization `g(0) = 0, g'(0) = 1, g''(0) = 0` and
/// for strict bending `g'''(0) < 0, g'' < 0` on the interior.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeReport {
    pub normalized_at_tip: bool,
    pub strictly_concave: bool,
    pub worst_violation: Option<Violation>,
}

impl ShapeReport {
    fn record(&mut self, condition: &str, at: f64, magnitude: f64) {
        let worse = match &self.worst_violation {
            Some(v) => magnitude > v.magnitude,
            None => true,
        };
        if worse {
            self.worst_violation = Some(Violation { condition: condition.into(), at, magnitude });
        }
    }
}

fn interior_grid(g: &SmoothFunction1D, n: usize) -> Vec<f64> {
    let (a, b) = g.domain();
    let b = if b.is_finite() { b } else { a + 1.0 };
    (1..=n).map(|i| a + (b - a) * i as f64 / (n + 1) as f64).collect()
}

pub fn check_shape_conditions(g: &SmoothFunction1D) -> ShapeReport {
    let mut report = ShapeReport { normalized_at_tip: true, strictly_concave: true, worst_violation: None };
    match g.jet(0.0) {
        Ok(j) => {
            for (name, defect) in [("g(0) = 0", j.value), ("g'(0) = 1", j.d1 - 1.0), ("g''(0) = 0", j.d2)] {
                if defect.abs() > TIP_TOLERANCE {
                    report.normalized_at_tip = false;
                    report.record(name, 0.0, defect.abs());
                }
            }
        }
        Err(_) => {
            report.normalized_at_tip = false;
            report.record("defined at 0", 0.0, f64::INFINITY);
        }
    }
    match g.third_derivative_at_zero() {
        Ok(d3) if d3 < 0.0 => {}
        Ok(d3) => {
            report.strictly_concave = false;
            report.record("g'''(0) < 0", 0.0, d3.max(0.0));
        }
        Err(_) => {
            report.strictly_concave = false;
            report.record("g'''(0) < 0", 0.0, f64::INFINITY);
        }
    }
    for r in interior_grid(g, SHAPE_GRID) {
        let d2 = g.jet(r).map(|j| j.d2).unwrap_or(f64::INFINITY);
        if !(d2 < 0.0) {
            report.strictly_concave = false;
            report.record("g'' < 0", r, d2.max(0.0));
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma13Verdict {
    pub t0: f64,
    /// `g_ε'(t) ≤ g₀'(t₀)`
    pub slope_bound: bool,
    /// `7t g_ε'(t) ≥ t₀ g₀'(t₀) + g_ε(t)`
    pub weighted_bound: bool,
    pub slope_margin: f64,
    pub weighted_margin: f64,
}

/// Solves `g₀(t₀) = g_ε(t)` on `[0, t]` by bisection and evaluates the two
/// comparison inequalities between `g_ε` at `t` and `g₀` at `t₀`.
pub fn lemma13_check(g_eps: &SmoothFunction1D, t: f64) -> Result<Lemma13Verdict> {
    if !(t > 0.0 && t < 1.0 / 3.0) {
        return Err(GeomError::Precondition(format!("t must lie in (0, 1/3), got {t}")));
    }
    let target = g_eps.jet(t)?;
    let f = |s: f64| g0_jet(s).value - target.value;
    let (mut lo, mut hi) = (0.0, t);
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return Err(GeomError::Bracket { lo, hi });
    }
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t0 = 0.5 * (lo + hi);
    let d0 = g0_jet(t0).d1;
    let slope_margin = d0 - target.d1;
    let weighted_margin = 7.0 * t * target.d1 - t0 * d0 - target.value;
    Ok(Lemma13Verdict {
        t0,
        slope_bound: slope_margin >= -1e-12,
        weighted_bound: weighted_margin >= -1e-12,
        slope_margin,
        weighted_margin,
    })
}

/// CSV table `r,g,d1,d2,d3` on `n + 1` evenly spaced points of the domain
/// (the right end is dropped for right-open domains).
pub fn profile_table_csv(g: &SmoothFunction1D, n: usize) -> Result<String> {
    let (a, b) = g.domain();
    let b = if b.is_finite() { b } else { a + 1.0 };
    let mut out = String::from("r,g,d1,d2,d3\n");
    for i in 0..=n.max(1) {
        let r = a + (b - a) * i as f64 / n.max(1) as f64;
        if !g.contains(r) {
            continue;
        }
        let j = g.jet(r)?;
        writeln!(out, "{r},{},{},{},{}", j.value, j.d1, j.d2, j.d3).expect("writing to a String");
    }
    Ok(out)
}
