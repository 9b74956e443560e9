//! Rotationally symmetric metrics `dr² + G(r)² dφ²` on `ℝⁿ` in Cartesian coordinates.

use serde::Serialize;

use crate::curvature::{min_sectional_scan, riemann, sectional_from, ChartMetric, CurvatureReport, ScanConfig};
use crate::error::{GeomError, Result};
use crate::numerics::linalg::norm;
use crate::numerics::sampling::in_shell;
use crate::numerics::SymMatrix;
use crate::smoothing::SmoothFunction1D;

pub const DEFAULT_R_MIN: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct ConicMetric {
    pub n: usize,
    pub profile: SmoothFunction1D,
    pub r_min: f64,
}

/// `I + ψ(r)(r² I − v vᵀ)` with `ψ` the sphere factor of `profile`; this is the
/// conic tensor written so that it stays finite at `v = 0`.
pub fn fiber_tensor(profile: &SmoothFunction1D, v: &[f64]) -> Result<SymMatrix> {
    let r2: f64 = v.iter().map(|x| x * x).sum();
    let psi = profile.sphere_factor(r2.sqrt())?;
    Ok(SymMatrix::from_fn(v.len(), |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta + psi * (r2 * delta - v[i] * v[j])
    }))
}

impl ConicMetric {
    pub fn new(n: usize, profile: SmoothFunction1D) -> Result<Self> {
        if n < 2 {
            return Err(GeomError::Precondition(format!("conic metric needs n ≥ 2, got {n}")));
        }
        let (_, end) = profile.domain();
        let end = if end.is_finite() { end } else { 1.0 };
        for i in 1..200 {
            let r = end * i as f64 / 200.0;
            if !(profile.value(r)? > 0.0) {
                return Err(GeomError::Precondition(format!("profile {} is not positive at r = {r}", profile.name())));
            }
        }
        Ok(Self { n, profile, r_min: DEFAULT_R_MIN })
    }

    pub fn chart(&self) -> ChartMetric {
        let c = self.clone();
        let profile = self.profile.clone();
        let r_min = self.r_min;
        ChartMetric::new(format!("conic-{}-{}", self.n, self.profile.name()), self.n, move |x| conic_chart_tensor(&c, x))
            .with_domain(move |x| {
                let r = norm(x);
                r >= r_min && profile.contains(r)
            })
    }
}

pub fn conic_chart_tensor(c: &ConicMetric, x: &[f64]) -> Result<SymMatrix> {
    if x.len() != c.n {
        return Err(GeomError::Precondition(format!("expected a point of ℝ^{}, got length {}", c.n, x.len())));
    }
    if norm(x) < c.r_min {
        return Err(GeomError::Domain { at: x.to_vec(), reason: format!("closer than {} to the tip", c.r_min) });
    }
    fiber_tensor(&c.profile, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneSample {
    pub r: f64,
    pub oracle: f64,
    pub candidate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConicReport {
    pub scan: CurvatureReport,
    /// Planes containing `∂r`; candidate `−G''/G`.
    pub radial: Vec<PlaneSample>,
    /// Planes tangent to the distance spheres; candidate `(1 − G'²)/G²`.
    pub tangential: Vec<PlaneSample>,
    pub passed: bool,
}

/// Oracle values of the two distinguished plane families at `x = r e₀`.
pub fn plane_families(c: &ConicMetric, r: f64) -> Result<(PlaneSample, Option<PlaneSample>)> {
    let chart = c.chart();
    let mut x = vec![0.0; c.n];
    x[0] = r;
    let g = chart.metric(&x)?;
    let rm = riemann(&chart, &x)?;
    let e = |i: usize| {
        let mut v = vec![0.0; c.n];
        v[i] = 1.0;
        v
    };
    let j = c.profile.jet(r)?;
    let radial = PlaneSample { r, oracle: sectional_from(&rm, &g, &e(0), &e(1))?, candidate: -j.d2 / j.value };
    let tangential = if c.n >= 3 {
        Some(PlaneSample {
            r,
            oracle: sectional_from(&rm, &g, &e(1), &e(2))?,
            candidate: (1.0 - j.d1 * j.d1) / (j.value * j.value),
        })
    } else {
        None
    };
    Ok((radial, tangential))
}

pub fn conic_positivity_check(c: &ConicMetric, annulus: (f64, f64), cfg: &ScanConfig) -> Result<ConicReport> {
    let (lo, hi) = annulus;
    if !(lo > 0.0 && lo < hi && c.profile.contains(hi) && lo >= c.r_min) {
        return Err(GeomError::Precondition(format!("invalid annulus [{lo}, {hi}]")));
    }
    let n = c.n;
    let scan = min_sectional_scan(
        &format!("conic-positivity:{}", c.profile.name()),
        &c.chart(),
        |rng| in_shell(rng, n, lo, hi),
        cfg,
    );
    let mut radial = Vec::new();
    let mut tangential = Vec::new();
    for i in 0..8 {
        let r = lo + (hi - lo) * i as f64 / 7.0;
        let (rad, tan) = plane_families(c, r)?;
        radial.push(rad);
        tangential.extend(tan);
    }
    let passed = scan.passed && radial.iter().chain(&tangential).all(|p| p.oracle > cfg.threshold);
    Ok(ConicReport { scan, radial, tangential, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sym_eig_min;
    use crate::numerics::linalg::sym_eigenvalues;
    use crate::smoothing::{build_g_eps, check_shape_conditions, g0, linear, sine};

    fn quick() -> ScanConfig {
        ScanConfig { points: 24, planes_per_point: 8, refine_iterations: 8, seed: 1, threshold: 0.0 }
    }

    #[test]
    fn tensor_examples() {
        let flat = ConicMetric::new(3, linear()).unwrap();
        let t = conic_chart_tensor(&flat, &[0.3, -0.1, 0.2]).unwrap();
        assert!(t.max_abs_diff(&SymMatrix::identity(3)) < 1e-15);
        let c = ConicMetric::new(3, g0()).unwrap();
        let x = [0.3, 0.4 * 0.999_999_999, 0.0];
        let ev = sym_eigenvalues(&conic_chart_tensor(&c, &x).unwrap());
        let r = norm(&x);
        let tangential = ((r - r * r * r) / r).powi(2);
        assert!(ev.iter().any(|e| (e - 1.0).abs() < 1e-12));
        assert_eq!(ev.iter().filter(|e| (*e - tangential).abs() < 1e-12).count(), 2);
        // |x| = 1/2 lies outside the g0 chart; the tangential eigenvalue limit is 9/16
        let near = [0.5 - 1e-12, 0.0, 0.0];
        let ev = sym_eigenvalues(&conic_chart_tensor(&c, &near).unwrap());
        assert!(ev.iter().any(|e| (e - 9.0 / 16.0).abs() < 1e-10));
        assert!(conic_chart_tensor(&c, &[1e-4, 0.0, 0.0]).is_err());
    }

    #[test]
    fn tip_continuity() {
        for profile in [g0(), sine(), build_g_eps(0.3).unwrap()] {
            let c = ConicMetric::new(3, profile).unwrap();
            let t = conic_chart_tensor(&c, &[6e-4, 8e-4, 0.0]).unwrap();
            assert!(t.max_abs_diff(&SymMatrix::identity(3)) <= 5e-3);
            assert!(sym_eig_min(&t) > 0.0);
        }
        // for small ε the profile leaves g₀ at a radius of order ε³
        let g = build_g_eps(0.05).unwrap();
        let t = fiber_tensor(&g, &[6e-6, 8e-6, 0.0]).unwrap();
        assert!(t.max_abs_diff(&SymMatrix::identity(3)) <= 5e-3);
        let t = fiber_tensor(&g, &[0.0; 3]).unwrap();
        assert_eq!(t, SymMatrix::identity(3));
    }

    #[test]
    fn g0_positivity_and_candidates() {
        let c = ConicMetric::new(3, g0()).unwrap();
        let report = conic_positivity_check(&c, (0.05, 0.45), &quick()).unwrap();
        assert!(report.passed, "{:?}", report.scan);
        let (rad, tan) = plane_families(&c, 0.1).unwrap();
        assert!((rad.oracle - 6.0 / 0.99).abs() < 1e-3, "{rad:?}");
        let tan = tan.unwrap();
        assert!((tan.oracle - tan.candidate).abs() < 1e-3 * tan.candidate.abs());
        for s in report.tangential.iter().chain(&report.radial) {
            assert!((s.oracle - s.candidate).abs() < 1e-3 * s.candidate.abs().max(1.0), "{s:?}");
        }
    }

    #[test]
    fn flat_cone_is_flat() {
        let c = ConicMetric::new(3, linear()).unwrap();
        let report = conic_positivity_check(&c, (0.05, 0.45), &ScanConfig { threshold: -1e-6, ..quick() }).unwrap();
        assert!(report.scan.min_value.abs() < 1e-6);
    }

    #[test]
    fn shape_conditions_predict_positivity() {
        let mut family = vec![g0(), sine()];
        for eps in [0.02, 0.05, 0.1] {
            family.push(build_g_eps(eps).unwrap());
        }
        for profile in family {
            let shape = check_shape_conditions(&profile);
            assert!(shape.strictly_concave);
            let c = ConicMetric::new(3, profile.clone()).unwrap();
            let report = conic_positivity_check(&c, (0.02, 0.45), &quick()).unwrap();
            assert!(report.passed, "{}: {}", profile.name(), report.scan.min_value);
        }
    }
}
