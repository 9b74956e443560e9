use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{failed, outcome, parse, rel_err, CheckError, CheckOutcome};
use crate::bundle::{BasePreset, BundleConfig, QPreset};
use crate::conic::{conic_positivity_check, ConicMetric};
use crate::curvature::{charts, riemann, sectional, ChartMetric, Riemann, ScanConfig};
use crate::error::Result;
use crate::numerics::sampling::{in_ball, normal_vec, rng_for};
use crate::smoothing::{g0, profile_by_name};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleTolerances {
    pub sphere: f64,
    pub flat: f64,
    pub bianchi: f64,
}

impl Default for OracleTolerances {
    fn default() -> Self {
        Self { sphere: 1e-4, flat: 1e-7, bianchi: 1e-6 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct OracleParams {
    points: usize,
    tolerances: OracleTolerances,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self { points: 20, tolerances: OracleTolerances::default() }
    }
}

#[derive(Debug, Serialize)]
struct CurvatureRow {
    metric: String,
    expected: f64,
    max_error: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct BianchiRow {
    metric: String,
    relative_defect: f64,
    passed: bool,
}

/// `max |R(a,b,c,·) + R(b,c,a,·) + R(c,a,b,·)|` over `max |R|`.
pub(crate) fn bianchi_defect(rm: &Riemann) -> f64 {
    let d = rm.dim();
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    worst = worst.max((rm.get(a, b, c, e) + rm.get(b, c, a, e) + rm.get(c, a, b, e)).abs());
                }
            }
        }
    }
    worst / rm.max_abs().max(1e-300)
}

fn constant_curvature_row(
    m: &ChartMetric,
    expected: f64,
    radius: f64,
    points: usize,
    seed: u64,
    tol: f64,
) -> Result<CurvatureRow> {
    let mut max_error: f64 = 0.0;
    for i in 0..points {
        let mut rng = rng_for(seed, i as u64);
        let x = in_ball(&mut rng, m.dim(), radius);
        let (u, w) = (normal_vec(&mut rng, m.dim()), normal_vec(&mut rng, m.dim()));
        max_error = max_error.max((sectional(m, &x, &u, &w)? - expected).abs());
    }
    Ok(CurvatureRow { metric: m.name().to_string(), expected, max_error, passed: max_error <= tol })
}

fn oracle_rows(p: &OracleParams, seed: u64) -> Result<(Vec<CurvatureRow>, Vec<BianchiRow>)> {
    let tol = &p.tolerances;
    let mut rows = Vec::new();
    for d in [2, 3, 4] {
        rows.push(constant_curvature_row(&charts::round_sphere(d, 1.0), 1.0, 1.5, p.points, seed, tol.sphere)?);
    }
    rows.push(constant_curvature_row(&charts::round_sphere(3, 2.0), 0.25, 1.5, p.points, seed, tol.sphere)?);
    rows.push(constant_curvature_row(&charts::euclidean(3), 0.0, 1.0, p.points, seed, tol.flat)?);
    let polar = charts::polar_plane();
    let mut polar_err: f64 = 0.0;
    for i in 0..p.points {
        let x = [0.5 + i as f64 / p.points as f64, 0.3];
        polar_err = polar_err.max(sectional(&polar, &x, &[1.0, 0.0], &[0.0, 1.0])?.abs());
    }
    rows.push(CurvatureRow {
        metric: polar.name().into(),
        expected: 0.0,
        max_error: polar_err,
        passed: polar_err <= tol.flat,
    });
    let bundle = BundleConfig {
        base: BasePreset::Sphere,
        n: 2,
        k: 2,
        q: QPreset::Varying,
        q_scale: 0.5,
        warp: "g0".into(),
        l: 1.0,
    }
    .build()?;
    let conic = ConicMetric::new(3, g0())?;
    let metrics: Vec<(ChartMetric, Vec<f64>)> = vec![
        (charts::round_sphere(3, 1.0), vec![0.2, -0.3, 0.4]),
        (charts::round_sphere(4, 2.0), vec![0.1, 0.5, -0.2, 0.3]),
        (polar, vec![0.8, 0.3]),
        (conic.chart(), vec![0.2, 0.1, -0.15]),
        (bundle.total_chart(), vec![0.1, 0.2, 0.15, -0.1]),
    ];
    let mut bianchi = Vec::new();
    for (m, x) in metrics {
        let d = bianchi_defect(&riemann(&m, &x)?);
        bianchi.push(BianchiRow { metric: m.name().into(), relative_defect: d, passed: d <= tol.bianchi });
    }
    Ok((rows, bianchi))
}

pub(super) fn oracle_sanity(params: Value, seed: u64) -> std::result::Result<CheckOutcome, CheckError> {
    let p: OracleParams = parse(params)?;
    match oracle_rows(&p, seed) {
        Ok((rows, bianchi)) => {
            let passed = rows.iter().all(|r| r.passed) && bianchi.iter().all(|r| r.passed);
            outcome(passed, serde_json::json!({ "curvature": rows, "bianchi": bianchi }), &p.tolerances)
        }
        Err(e) => failed(e, &p.tolerances),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConicTolerances {
    pub relative: f64,
}

impl Default for ConicTolerances {
    fn default() -> Self {
        Self { relative: 1e-3 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ConicParams {
    n: usize,
    annulus: (f64, f64),
    profiles: Vec<String>,
    scan: ScanConfig,
    tolerances: ConicTolerances,
}

impl Default for ConicParams {
    fn default() -> Self {
        Self {
            n: 3,
            annulus: (0.05, 0.45),
            profiles: vec!["g0".into(), "geps:0.05".into()],
            scan: ScanConfig { points: 48, planes_per_point: 16, refine_iterations: 12, seed: 0, threshold: 0.0 },
            tolerances: ConicTolerances::default(),
        }
    }
}

#[derive(Debug, Serialize)]
struct ConicRow {
    profile: String,
    radial_max_rel_error: f64,
    tangential_max_rel_error: f64,
    scan_min: f64,
    scan_witness: Vec<f64>,
    passed: bool,
}

fn conic_rows(p: &ConicParams, seed: u64) -> Result<Vec<ConicRow>> {
    let cfg = ScanConfig { seed, ..p.scan };
    let mut rows = Vec::new();
    for name in &p.profiles {
        let c = ConicMetric::new(p.n, profile_by_name(name)?)?;
        let rep = conic_positivity_check(&c, p.annulus, &cfg)?;
        let worst = |s: &[crate::conic::PlaneSample]| s.iter().map(|x| rel_err(x.oracle, x.candidate)).fold(0.0, f64::max);
        let (radial, tangential) = (worst(&rep.radial), worst(&rep.tangential));
        rows.push(ConicRow {
            profile: name.clone(),
            radial_max_rel_error: radial,
            tangential_max_rel_error: tangential,
            scan_min: rep.scan.min_value,
            scan_witness: rep.scan.witness_point.clone(),
            passed: rep.passed
                && rep.scan.min_value > 0.0
                && radial <= p.tolerances.relative
                && tangential <= p.tolerances.relative,
        });
    }
    Ok(rows)
}

pub(super) fn conic_equivalence(params: Value, seed: u64) -> std::result::Result<CheckOutcome, CheckError> {
    let p: ConicParams = parse(params)?;
    match conic_rows(&p, seed) {
        Ok(rows) => outcome(rows.iter().all(|r| r.passed), serde_json::json!({ "profiles": rows }), &p.tolerances),
        Err(e) => failed(e, &p.tolerances),
    }
}
