use nalgebra::DMatrix;
use serde::Serialize;

use super::{ModelBundle, TotalVector};
use crate::curvature::{min_sectional_scan, ChartMetric, CurvatureReport, ScanConfig};
use crate::error::{GeomError, Result};
use crate::numerics::sampling::{in_ball, in_shell, normal_vec, rng_for, unit_vec, uniform};
use crate::numerics::{fd_directional, FdPolicy, SymMatrix};
use crate::smoothing::build_g_eps;

/// Radius of the base ball that all bundle samplers draw from.
pub const BASE_SAMPLE_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct M1Estimate {
    pub value: f64,
    pub samples: usize,
    pub witness: Vec<f64>,
}

/// Supremum over samples of `|[X,Y]'|·(1 − Lr²)/(G(r)|X||Y|)`, all norms
/// taken in the total metric.
pub fn estimate_m1(b: &ModelBundle, samples: usize, seed: u64) -> Result<M1Estimate> {
    let (_, end) = b.profile.domain();
    let mut r_hi = 0.3_f64.min(0.9 * end);
    if b.l > 0.0 {
        r_hi = r_hi.min(0.9 / b.l.sqrt());
    }
    let mut best = M1Estimate { value: 0.0, samples, witness: Vec::new() };
    for i in 0..samples {
        let mut rng = rng_for(seed, i as u64);
        let p = in_ball(&mut rng, b.n, BASE_SAMPLE_RADIUS);
        let r = uniform(&mut rng, 0.2 * r_hi, r_hi);
        let v: Vec<f64> = unit_vec(&mut rng, b.k).iter().map(|c| c * r).collect();
        let x = normal_vec(&mut rng, b.n);
        let y = normal_vec(&mut rng, b.n);
        let g = b.total_metric(&p, &v)?;
        let w = b.bracket_vertical_along(&p, &v, &x, &y)?;
        let wv = TotalVector::vertical(w, b.n).coords();
        let xv = b.basic_lift(&p, &v, &x).coords();
        let yv = b.basic_lift(&p, &v, &y).coords();
        let denom = b.profile.value(r)? * g.inner(&xv, &xv).sqrt() * g.inner(&yv, &yv).sqrt();
        if denom <= 0.0 {
            continue;
        }
        let ratio = g.inner(&wv, &wv).sqrt() * (1.0 - b.l * r * r) / denom;
        if ratio > best.value {
            best.value = ratio;
            best.witness = [p, v].concat();
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LSelection {
    pub l: f64,
    pub m1: f64,
    pub delta: f64,
    pub base_min_curvature: f64,
    pub third_derivative_at_zero: f64,
}

/// Slack allowed when comparing `δ` with the scanned base curvature minimum.
const BASE_CURVATURE_SLACK: f64 = 1e-6;

/// `L = 2 M₁ + δ`. Without an explicit `δ`, uses half the smaller of
/// `−G'''(0)` and the scanned base curvature minimum.
pub fn select_l(b: &ModelBundle, delta: Option<f64>, base_scan: &ScanConfig, m1_samples: usize) -> Result<LSelection> {
    let d3 = b.profile.third_derivative_at_zero()?;
    let n = b.n;
    let scan = min_sectional_scan("base", &b.base, |rng| in_ball(rng, n, BASE_SAMPLE_RADIUS), base_scan);
    if scan.failed_points > 0 || scan.empty {
        return Err(GeomError::Precondition(format!(
            "base curvature scan failed: {}",
            scan.first_error.unwrap_or_else(|| "no samples".into())
        )));
    }
    let base_min = scan.min_value;
    let delta = delta.unwrap_or(0.5 * (-d3).min(base_min));
    if !(delta > 0.0) {
        return Err(GeomError::Precondition(format!(
            "δ = {delta} must be positive (−G'''(0) = {}, base curvature ≥ {base_min})",
            -d3
        )));
    }
    if delta > -d3 {
        return Err(GeomError::Precondition(format!("δ = {delta} exceeds −G'''(0) = {}", -d3)));
    }
    if delta > base_min + BASE_CURVATURE_SLACK {
        return Err(GeomError::Precondition(format!("δ = {delta} exceeds the base curvature minimum {base_min}")));
    }
    let m1 = estimate_m1(b, m1_samples, base_scan.seed)?.value;
    Ok(LSelection { l: 2.0 * m1 + delta, m1, delta, base_min_curvature: base_min, third_derivative_at_zero: d3 })
}

/// Largest difference between the zero-section 1-jets of `bundles` at `p`.
/// The FD step shrinks below each profile's tip scale so the stencil does
/// not reach past the innermost piece.
pub fn jet_defect_across(bundles: &[ModelBundle], p: &[f64]) -> Result<f64> {
    let mut jets = Vec::new();
    for b in bundles {
        let point: Vec<f64> = p.iter().copied().chain(std::iter::repeat_n(0.0, b.k)).collect();
        let mut jet = b.metric_at(&point)?.as_slice().to_vec();
        let h = b.profile.tip_scale().map_or(b.policy.h, |t| b.policy.h.min(0.05 * t));
        let policy = FdPolicy { h, ..b.policy };
        for l in 0..b.dim() {
            let mut e = vec![0.0; b.dim()];
            e[l] = 1.0;
            jet.extend(fd_directional(|x| b.metric_at(x).map(|g| g.as_slice().to_vec()), &point, &e, policy)?);
        }
        jets.push(jet);
    }
    let mut worst: f64 = 0.0;
    for j in jets.iter().skip(1) {
        for (a, c) in j.iter().zip(&jets[0]) {
            worst = worst.max((a - c).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyScan {
    pub eps: Vec<f64>,
    pub reports: Vec<CurvatureReport>,
    pub jet_defect: f64,
}

/// Scans `{r_floor ≤ r < ρ₀/L}` of the bundle rebuilt with `G = g_ε` for each
/// `ε`, and compares the metrics' 1-jets on the zero section.
pub fn positivity_scan_family(
    b: &ModelBundle,
    eps: &[f64],
    l: f64,
    rho0: f64,
    r_floor: f64,
    cfg: &ScanConfig,
) -> Result<FamilyScan> {
    let r_hi = if l > 0.0 { rho0 / l } else { f64::INFINITY };
    let r_hi = r_hi.min(0.45);
    let mut bundles = Vec::new();
    let mut reports = Vec::new();
    for &e in eps {
        let bb = b.with_profile(build_g_eps(e)?, l);
        let (n, k) = (bb.n, bb.k);
        let cfg_e = if r_hi > r_floor { *cfg } else { ScanConfig { points: 0, ..*cfg } };
        let report = min_sectional_scan(
            &format!("bundle-positivity:eps={e}"),
            &bb.total_chart(),
            |rng| {
                let mut x = in_ball(rng, n, BASE_SAMPLE_RADIUS);
                x.extend(in_shell(rng, k, r_floor, r_hi));
                x
            },
            &cfg_e,
        );
        reports.push(report);
        bundles.push(bb);
    }
    let jet_defect = jet_defect_across(&bundles, &vec![0.1; b.n])?;
    Ok(FamilyScan { eps: eps.to_vec(), reports, jet_defect })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractedQ {
    pub matrices: Vec<Vec<Vec<f64>>>,
    pub asymmetry_defect: f64,
}

impl ExtractedQ {
    pub fn as_dmatrices(&self) -> Vec<DMatrix<f64>> {
        self.matrices
            .iter()
            .map(|m| DMatrix::from_fn(m.len(), m.len(), |i, j| m[i][j]))
            .collect()
    }
}

/// Recovers `(Qᵢ)_{ba} = ∂_{v_a} g(∂_{v_b}, ∂_{pᵢ})` at `(p, 0)` from a metric
/// whose base is the coordinate plane `{v = 0}` with orthogonal, unit-normal
/// fibers there.
pub fn extract_q(ambient: &ChartMetric, n: usize, p: &[f64]) -> Result<ExtractedQ> {
    let d = ambient.dim();
    if n >= d {
        return Err(GeomError::Precondition(format!("base dimension {n} must be below {d}")));
    }
    let k = d - n;
    let point: Vec<f64> = p.iter().copied().chain(std::iter::repeat_n(0.0, k)).collect();
    let g = ambient.metric(&point)?;
    let mut defect: f64 = 0.0;
    for a in 0..k {
        for i in 0..n {
            defect = defect.max(g.get(n + a, i).abs());
        }
        for c in 0..k {
            let want = if a == c { 1.0 } else { 0.0 };
            defect = defect.max((g.get(n + a, n + c) - want).abs());
        }
    }
    if defect > 1e-6 {
        return Err(GeomError::Precondition(format!(
            "fibers are not orthonormal to the base at v = 0 (defect {defect:e})"
        )));
    }
    let derivs: Vec<SymMatrix> = (0..k)
        .map(|a| {
            let mut e = vec![0.0; d];
            e[n + a] = 1.0;
            let flat = fd_directional(|x| ambient.metric(x).map(|m| m.as_slice().to_vec()), &point, &e, ambient.policy())?;
            Ok(SymMatrix::from_upper(d, flat))
        })
        .collect::<Result<_>>()?;
    let mut asym: f64 = 0.0;
    let mut matrices = Vec::with_capacity(n);
    for i in 0..n {
        let raw = DMatrix::from_fn(k, k, |b, a| derivs[a].get(n + b, i));
        asym = asym.max((&raw + raw.transpose()).amax());
        let anti = (&raw - raw.transpose()) * 0.5;
        matrices.push((0..k).map(|r| (0..k).map(|c| anti[(r, c)]).collect()).collect());
    }
    Ok(ExtractedQ { matrices, asymmetry_defect: asym })
}
