use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::cutoff::{build_cutoff, Cutoff};
use crate::bundle::{select_l, BasePreset, BundleConfig, QPreset, BASE_SAMPLE_RADIUS};
use crate::curvature::{merge_reports, min_sectional_scan, riemann, ChartMetric, CurvatureReport, Riemann, ScanConfig};
use crate::error::{GeomError, Result};
use crate::numerics::linalg::norm;
use crate::numerics::sampling::{in_ball, uniform, unit_vec};
use crate::numerics::{fd_directional, FdPolicy};

/// Distance to the submanifold, as a function of chart coordinates.
pub type RadialFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

const JET_TOLERANCE: f64 = 1e-6;

fn metric_jet(m: &ChartMetric, x: &[f64]) -> Result<Vec<f64>> {
    let mut jet = m.metric(x)?.as_slice().to_vec();
    for i in 0..m.dim() {
        let mut e = vec![0.0; m.dim()];
        e[i] = 1.0;
        jet.extend(fd_directional(|y| m.metric(y).map(|g| g.as_slice().to_vec()), x, &e, m.policy())?);
    }
    Ok(jet)
}

/// Largest difference between the 1-jets of `m0` and `m1` over `points`.
pub fn jet_defect(m0: &ChartMetric, m1: &ChartMetric, points: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let mut worst = (0.0, Vec::new());
    for p in points {
        let (a, b) = (metric_jet(m0, p)?, metric_jet(m1, p)?);
        let d = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        if d >= worst.0 {
            worst = (d, p.clone());
        }
    }
    Ok(worst)
}

/// The fixed-weight blend `(1 − s) m0 + s m1`.
pub fn blend(m0: &ChartMetric, m1: &ChartMetric, s: f64) -> ChartMetric {
    let (a, b) = (m0.clone(), m1.clone());
    let (da, db) = (m0.clone(), m1.clone());
    ChartMetric::new(format!("blend({},{};{s})", m0.name(), m1.name()), m0.dim(), move |x| {
        Ok(a.metric(x)?.combine(1.0 - s, &b.metric(x)?, s))
    })
    .with_domain(move |x| da.in_domain(x) && db.in_domain(x))
    .with_policy(m0.policy())
}

/// `q ↦ (1 − φ(r(q))) m0(q) + φ(r(q)) m1(q)`, after checking that the two
/// metrics share 1-jets at `zero_points`.
pub fn glue_metrics(
    m0: &ChartMetric,
    m1: &ChartMetric,
    r: RadialFn,
    c: &Cutoff,
    zero_points: &[Vec<f64>],
) -> Result<ChartMetric> {
    if m0.dim() != m1.dim() {
        return Err(GeomError::Precondition(format!("dimensions differ: {} vs {}", m0.dim(), m1.dim())));
    }
    let (defect, at) = jet_defect(m0, m1, zero_points)?;
    if defect > JET_TOLERANCE {
        return Err(GeomError::JetMismatch { at, defect });
    }
    let (a, b, c) = (m0.clone(), m1.clone(), *c);
    let (da, db) = (m0.clone(), m1.clone());
    Ok(ChartMetric::new(format!("glue({},{};ε={})", m0.name(), m1.name(), c.eps), m0.dim(), move |x| {
        let s = c.phi(r(x));
        let g0 = a.metric(x)?;
        if s == 0.0 {
            return Ok(g0);
        }
        let g1 = b.metric(x)?;
        if s == 1.0 {
            return Ok(g1);
        }
        Ok(g0.combine(1.0 - s, &g1, s))
    })
    .with_domain(move |x| da.in_domain(x) && db.in_domain(x))
    .with_policy(m0.policy()))
}

fn max_component_diff(a: &Riemann, b: &Riemann, weight: Option<(&Riemann, f64)>) -> f64 {
    let d = a.dim();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let target = match weight {
                        Some((c, s)) => (1.0 - s) * b.get(i, j, k, l) + s * c.get(i, j, k, l),
                        None => b.get(i, j, k, l),
                    };
                    worst = worst.max((a.get(i, j, k, l) - target).abs());
                }
            }
        }
    }
    worst
}

/// `max |R̄(s) − (1 − s)R₀ − sR₁|` over components at `x`.
pub fn convexity_defect(m0: &ChartMetric, m1: &ChartMetric, x: &[f64], s: f64) -> Result<f64> {
    let rs = riemann(&blend(m0, m1, s), x)?;
    Ok(max_component_diff(&rs, &riemann(m0, x)?, Some((&riemann(m1, x)?, s))))
}

/// `max |R_glued − R̄(φ(r(x)))|` over components at `x`.
pub fn blend_defect(
    glued: &ChartMetric,
    m0: &ChartMetric,
    m1: &ChartMetric,
    r: &RadialFn,
    c: &Cutoff,
    x: &[f64],
) -> Result<f64> {
    let s = c.phi(r(x));
    Ok(max_component_diff(&riemann(glued, x)?, &riemann(&blend(m0, m1, s), x)?, None))
}

/// Canonical gluing scene: one bundle at two values of `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluingScene {
    /// `L` here is used as `L₀` when positive; otherwise `L₀` comes from `select_l`.
    pub bundle: BundleConfig,
    #[serde(default = "default_schedule")]
    pub schedule: Vec<f64>,
    #[serde(default = "default_ratio")]
    pub l_ratio: f64,
    #[serde(default = "default_floor")]
    pub r_floor: f64,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default = "default_m1_samples")]
    pub m1_samples: usize,
}

fn default_schedule() -> Vec<f64> {
    vec![0.2, 0.1, 0.05, 0.02]
}

fn default_ratio() -> f64 {
    2.0
}

fn default_floor() -> f64 {
    1e-3
}

fn default_m1_samples() -> usize {
    200
}

impl Default for GluingScene {
    fn default() -> Self {
        Self {
            bundle: BundleConfig {
                base: BasePreset::Sphere,
                n: 2,
                k: 2,
                q: QPreset::Varying,
                q_scale: 0.5,
                warp: "g0".into(),
                l: 0.0,
            },
            schedule: default_schedule(),
            l_ratio: default_ratio(),
            r_floor: default_floor(),
            scan: ScanConfig { points: 32, planes_per_point: 12, refine_iterations: 10, seed: 0, threshold: 0.0 },
            m1_samples: default_m1_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GluingAttempt {
    pub cutoff: Cutoff,
    pub annulus: (f64, f64),
    pub report: CurvatureReport,
    /// Riemann gap between the glued metric and the fixed-weight blend at
    /// the report's witness.
    pub blend_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GluingReport {
    pub l0: f64,
    pub l1: f64,
    pub attempts: Vec<GluingAttempt>,
    pub succeeded_eps: Option<f64>,
    pub passed: bool,
}

/// The scene's two metrics, the radial function and sample points on the
/// zero section.
pub struct SceneMetrics {
    pub m0: ChartMetric,
    pub m1: ChartMetric,
    pub r: RadialFn,
    pub zero_points: Vec<Vec<f64>>,
    pub n: usize,
    pub k: usize,
    pub l0: f64,
    pub l1: f64,
}

pub fn scene_metrics(scene: &GluingScene) -> Result<SceneMetrics> {
    let b = scene.bundle.build()?;
    let l0 = if scene.bundle.l > 0.0 { scene.bundle.l } else { select_l(&b, None, &scene.scan, scene.m1_samples)?.l };
    let l1 = scene.l_ratio * l0;
    let (n, k) = (b.n, b.k);
    let m0 = b.with_profile(b.profile.clone(), l0).total_chart();
    let m1 = b.with_profile(b.profile.clone(), l1).total_chart();
    let zero_points = (0..5)
        .map(|i| {
            let mut p: Vec<f64> = (0..n).map(|j| 0.3 * ((i * n + j) as f64).sin()).collect();
            p.extend(std::iter::repeat_n(0.0, k));
            p
        })
        .collect();
    let r: RadialFn = Arc::new(move |x: &[f64]| norm(&x[n..]));
    Ok(SceneMetrics { m0, m1, r, zero_points, n, k, l0, l1 })
}

/// Scans `{lo ≤ r ≤ hi}` in geometric bands, each with an FD step scaled to
/// the band.
pub fn annulus_scan(
    check: &str,
    m: &ChartMetric,
    n: usize,
    k: usize,
    (lo, hi): (f64, f64),
    cfg: &ScanConfig,
) -> CurvatureReport {
    if !(lo < hi) {
        return merge_reports(check, vec![min_sectional_scan(check, m, |_| Vec::new(), &ScanConfig { points: 0, ..*cfg })]);
    }
    let bands = ((hi / lo).ln() / 4f64.ln()).ceil().max(1.0) as usize;
    let ratio = (hi / lo).powf(1.0 / bands as f64);
    let per_band = cfg.points.div_ceil(bands).max(2);
    let parts = (0..bands)
        .map(|i| {
            let a = lo * ratio.powi(i as i32);
            let b = a * ratio;
            let h = m.policy().h.min(a / 8.0);
            let chart = m.clone().with_policy(FdPolicy { h, ..m.policy() });
            let band_cfg = ScanConfig {
                points: per_band,
                seed: cfg.seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
                ..*cfg
            };
            min_sectional_scan(check, &chart, |rng| {
                let mut x = in_ball(rng, n, BASE_SAMPLE_RADIUS);
                let r = uniform(rng, a.ln(), b.ln()).exp();
                x.extend(unit_vec(rng, k).iter().map(|u| u * r));
                x
            }, &band_cfg)
        })
        .collect();
    merge_reports(check, parts)
}

/// Glues the scene's metrics for each `ε` of the schedule until the blend
/// annulus scans positive.
pub fn glued_positivity_demo(scene: &GluingScene) -> Result<GluingReport> {
    let sm = scene_metrics(scene)?;
    let mut attempts = Vec::new();
    let mut succeeded = None;
    for &eps in &scene.schedule {
        let c = build_cutoff(eps)?;
        let glued = glue_metrics(&sm.m0, &sm.m1, sm.r.clone(), &c, &sm.zero_points)?;
        let annulus = (c.delta1.max(scene.r_floor), c.delta2);
        let report = annulus_scan(&format!("glued-positivity:eps={eps}"), &glued, sm.n, sm.k, annulus, &scene.scan);
        let blend_defect = if report.witness_point.is_empty() {
            0.0
        } else {
            let h = glued.policy().h.min((sm.r)(&report.witness_point) / 8.0);
            let local = |m: &ChartMetric| m.clone().with_policy(FdPolicy { h, ..m.policy() });
            blend_defect(&local(&glued), &local(&sm.m0), &local(&sm.m1), &sm.r, &c, &report.witness_point)?
        };
        let passed = report.passed;
        attempts.push(GluingAttempt { cutoff: c, annulus, report, blend_defect });
        if passed {
            succeeded = Some(eps);
            break;
        }
    }
    Ok(GluingReport { l0: sm.l0, l1: sm.l1, attempts, succeeded_eps: succeeded, passed: succeeded.is_some() })
}
