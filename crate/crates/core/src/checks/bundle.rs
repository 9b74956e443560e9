use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{failed, outcome, parse, rel_err, CheckError, CheckOutcome};
use crate::bundle::{
    curvature_at_n, curvature_at_n_oracle, curvature_regular, extract_q, positivity_scan_family, select_l, v_form,
    w_form, BasePreset, BundleConfig, QPreset, TotalVector, BASE_SAMPLE_RADIUS,
};
use crate::curvature::{riemann, sectional_from, ScanConfig};
use crate::error::Result;
use crate::numerics::linalg::gram_schmidt;
use crate::numerics::sampling::{in_ball, normal_vec, rng_for, uniform, unit_vec, SampleRng};
use crate::numerics::SymMatrix;

fn scene(q: QPreset, q_scale: f64, l: f64) -> BundleConfig {
    BundleConfig { base: BasePreset::Sphere, n: 2, k: 2, q, q_scale, warp: "g0".into(), l }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RelativeTolerance {
    pub relative: f64,
}

impl Default for RelativeTolerance {
    fn default() -> Self {
        Self { relative: 1e-3 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FormulaParams {
    bundle: BundleConfig,
    points: usize,
    pairs: usize,
    r_range: (f64, f64),
    tolerances: RelativeTolerance,
}

impl Default for FormulaParams {
    fn default() -> Self {
        Self {
            bundle: scene(QPreset::Varying, 0.5, 1.0),
            points: 30,
            pairs: 10,
            r_range: (0.05, 0.3),
            tolerances: RelativeTolerance::default(),
        }
    }
}

#[derive(Debug, Serialize)]
struct FormulaPoint {
    p: Vec<f64>,
    v: Vec<f64>,
    max_rel_error: f64,
}

fn formula_point(p: &FormulaParams, b: &crate::bundle::ModelBundle, seed: u64, i: usize) -> Result<FormulaPoint> {
    let mut rng = rng_for(seed, i as u64);
    let base = in_ball(&mut rng, b.n, BASE_SAMPLE_RADIUS);
    let r = uniform(&mut rng, p.r_range.0, p.r_range.1);
    let v: Vec<f64> = unit_vec(&mut rng, b.k).iter().map(|c| c * r).collect();
    let g = b.total_metric(&base, &v)?;
    let rm = riemann(&b.total_chart(), &[base.clone(), v.clone()].concat())?;
    let mut worst: f64 = 0.0;
    for _ in 0..p.pairs {
        let dim = b.dim();
        let basis = gram_schmidt(&g, &[normal_vec(&mut rng, dim), normal_vec(&mut rng, dim)], 1e-8);
        let (e, f) = (&basis[0], &basis[1]);
        let oracle = sectional_from(&rm, &g, e, f)?;
        let split = |x: &Vec<f64>| TotalVector::new(x[..b.n].to_vec(), x[b.n..].to_vec());
        let formula = curvature_regular(b, &base, &v, &split(e), &split(f))?;
        worst = worst.max(rel_err(formula, oracle));
    }
    Ok(FormulaPoint { p: base, v, max_rel_error: worst })
}

pub(super) fn formula_vs_oracle(params: Value, seed: u64) -> std::result::Result<CheckOutcome, CheckError> {
    let p: FormulaParams = parse(params)?;
    let run = || -> Result<Vec<FormulaPoint>> {
        let b = p.bundle.build()?;
        (0..p.points).into_par_iter().map(|i| formula_point(&p, &b, seed, i)).collect()
    };
    match run() {
        Ok(points) => {
            let worst = points.iter().map(|x| x.max_rel_error).fold(0.0, f64::max);
            let details = serde_json::json!({ "max_rel_error": worst, "points": points });
            outcome(worst <= p.tolerances.relative, details, &p.tolerances)
        }
        Err(e) => failed(e, &p.tolerances),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZeroSectionTolerances {
    pub relative: f64,
    pub vertical: f64,
}

impl Default for ZeroSectionTolerances {
    fn default() -> Self {
        Self { relative: 1e-3, vertical: 1e-3 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ZeroSectionParams {
    bundle: BundleConfig,
    configurations: usize,
    tolerances: ZeroSectionTolerances,
}

impl Default for ZeroSectionParams {
    fn default() -> Self {
        Self { bundle: scene(QPreset::Varying, 0.5, 1.0), configurations: 10, tolerances: ZeroSectionTolerances::default() }
    }
}

#[derive(Debug, Serialize)]
struct ZeroSectionRow {
    kind: &'static str,
    formula: f64,
    oracle: f64,
    rel_error: f64,
}

fn zero_section_rows(p: &ZeroSectionParams, seed: u64) -> Result<Vec<ZeroSectionRow>> {
    let b = p.bundle.build()?;
    let (n, k) = (b.n, b.k);
    (0..p.configurations)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let base = in_ball(&mut rng, n, BASE_SAMPLE_RADIUS);
            let (kind, a, bb, x, y) = match i {
                0 => {
                    let basis = gram_schmidt(&SymMatrix::identity(k), &[normal_vec(&mut rng, k), normal_vec(&mut rng, k)], 1e-8);
                    ("vertical", basis[0].clone(), basis[1].clone(), vec![0.0; n], vec![0.0; n])
                }
                1 => ("horizontal", vec![0.0; k], vec![0.0; k], normal_vec(&mut rng, n), normal_vec(&mut rng, n)),
                _ => (
                    "mixed",
                    normal_vec(&mut rng, k),
                    normal_vec(&mut rng, k),
                    normal_vec(&mut rng, n),
                    normal_vec(&mut rng, n),
                ),
            };
            let formula = curvature_at_n(&b, &base, &a, &bb, &x, &y)?;
            let oracle = curvature_at_n_oracle(&b, &base, &a, &bb, &x, &y)?;
            Ok(ZeroSectionRow { kind, formula, oracle, rel_error: rel_err(formula, oracle) })
        })
        .collect()
}

pub(super) fn zero_section(params: Value, seed: u64) -> std::result::Result<CheckOutcome, CheckError> {
    let p: ZeroSectionParams = parse(params)?;
    match zero_section_rows(&p, seed) {
        Ok(rows) => {
            let d3 = p.bundle.build().and_then(|b| b.profile.third_derivative_at_zero());
            let vertical_target = d3.map(|d| -d).unwrap_or(f64::NAN);
            let passed = rows.iter().all(|r| r.rel_error <= p.tolerances.relative)
                && rows
                    .iter()
                    .filter(|r| r.kind == "vertical")
                    .all(|r| (r.formula - vertical_target).abs() <= p.tolerances.vertical);
            outcome(passed, serde_json::json!({ "vertical_target": vertical_target, "configurations": rows }), &p.tolerances)
        }
        Err(e) => failed(e, &p.tolerances),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VwTolerances {
    pub identity: f64,
    pub bound: f64,
}

impl Default for VwTolerances {
    fn default() -> Self {
        Self { identity: 1e-12, bound: 1e-12 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct VwParams {
    draws: usize,
    /// Dimensions of the two orthogonal summands.
    split: (usize, usize),
    tolerances: VwTolerances,
}

impl Default for VwParams {
    fn default() -> Self {
        Self { draws: 100_000, split: (3, 4), tolerances: VwTolerances::default() }
    }
}

fn split_draw(rng: &mut SampleRng, (a, b): (usize, usize)) -> [Vec<f64>; 4] {
    let first = |rng: &mut SampleRng| [normal_vec(rng, a), vec![0.0; b]].concat();
    let second = |rng: &mut SampleRng| [vec![0.0; a], normal_vec(rng, b)].concat();
    [first(rng), first(rng), second(rng), second(rng)]
}

fn add(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(p, q)| p + q).collect()
}

#[derive(Debug, Serialize)]
struct VwSummary {
    draws: usize,
    identity_max_defect: f64,
    w_min: f64,
    orthonormal_bound_min_margin: f64,
    orthonormal_draws: usize,
}

fn vw_summary(p: &VwParams, seed: u64) -> VwSummary {
    let (a, b) = p.split;
    let g = SymMatrix::identity(a + b);
    let mut out = VwSummary {
        draws: p.draws,
        identity_max_defect: 0.0,
        w_min: f64::INFINITY,
        orthonormal_bound_min_margin: f64::INFINITY,
        orthonormal_draws: 0,
    };
    let mut rng = rng_for(seed, 0);
    for _ in 0..p.draws {
        let [aa, bb, x, y] = split_draw(&mut rng, p.split);
        let w = w_form(&g, &aa, &bb, &x, &y);
        let lhs = v_form(&g, &add(&aa, &x), &add(&bb, &y));
        let rhs = v_form(&g, &aa, &bb) + v_form(&g, &x, &y) + w;
        out.identity_max_defect = out.identity_max_defect.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
        out.w_min = out.w_min.min(w);
    }
    let mut rng = rng_for(seed, 1);
    for _ in 0..p.draws {
        let [aa, bb, x, y] = split_draw(&mut rng, p.split);
        let e = gram_schmidt(&g, &[add(&aa, &x), add(&bb, &y)], 1e-8);
        if e.len() < 2 {
            continue;
        }
        let proj = |v: &[f64], lo: usize, hi: usize| -> Vec<f64> {
            v.iter().enumerate().map(|(i, c)| if (lo..hi).contains(&i) { *c } else { 0.0 }).collect()
        };
        let (aa, x) = (proj(&e[0], 0, a), proj(&e[0], a, a + b));
        let (bb, y) = (proj(&e[1], 0, a), proj(&e[1], a, a + b));
        let w = w_form(&g, &aa, &bb, &x, &y);
        let bound = 0.5 * (g.inner(&aa, &aa) + g.inner(&bb, &bb)) * (g.inner(&x, &x) + g.inner(&y, &y));
        out.orthonormal_bound_min_margin = out.orthonormal_bound_min_margin.min(w - bound);
        out.orthonormal_draws += 1;
    }
    out
}

pub(super) fn vw_identities(params: Value, seed: u64) -> std::result::Result<CheckOutcome, CheckError> {
    let p: VwParams = parse(params)?;
    if p.split.0 == 0 || p.split.1 == 0 {
        return Err(CheckError::Config("split: both summands need positive dimension".into()));
    }
    let s = vw_summary(&p, seed);
    let t = &p.tolerances;
    let passed = s.identity_max_defect <= t.identity
        && s.w_min >= -t.bound
        && s.orthonormal_bound_min_margin >= -t.bound;
    outcome(passed, s, t)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FamilyTolerances {
    pub jet: f64,
}

impl Default for FamilyTolerances {
    fn default() -> Self {
        Self { jet: 1e-6 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FamilyParams {
    bundle: BundleConfig,
    eps: Vec<f64>,
    delta: Option<f64>,
    /// Outer radius `ρ₀/L` of the scanned neighbourhood.
    r_max: f64,
    r_floor: f64,
    m1_samples: usize,
    scan: ScanConfig,
    tolerances: FamilyTolerances,
}

impl Default for FamilyParams {
    fn default() -> Self {
        Self {
            bundle: scene(QPreset::Varying, 0.2, 0.0),
            eps: vec![0.02, 0.05],
            delta: None,
            r_max: 0.1,
            r_floor: 0.01,
            m1_samples: 200,
            scan: ScanConfig { points: 48, planes_per_point: 16, refine_iterations: 12, seed: 0, threshold: 0.0 },
            tolerances: FamilyTolerances::default(),
        }
    }
}

pub(super) fn positivity_family(params: Value, seed: u64) -> std::result::Result<CheckOutcome, CheckError> {
    let p: FamilyParams = parse(params)?;
    let cfg = ScanConfig { seed, ..p.scan };
    let run = || -> Result<_> {
        let b = p.bundle.build()?;
        let sel = select_l(&b, p.delta, &cfg, p.m1_samples)?;
        let rho0 = p.r_max * sel.l;
        let family = positivity_scan_family(&b, &p.eps, sel.l, rho0, p.r_floor, &cfg)?;
        Ok((sel, rho0, family))
    };
    match run() {
        Ok((sel, rho0, family)) => {
            let passed = family.reports.iter().all(|r| r.passed && !r.empty) && family.jet_defect <= p.tolerances.jet;
            let details = serde_json::json!({ "selection": sel, "rho0": rho0, "family": family });
            outcome(passed, details, &p.tolerances)
        }
        Err(e) => failed(e, &p.tolerances),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RoundTripTolerances {
    pub roundtrip: f64,
    pub asymmetry: f64,
}

impl Default for RoundTripTolerances {
    fn default() -> Self {
        Self { roundtrip: 1e-5, asymmetry: 1e-6 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RoundTripParams {
    base: BasePreset,
    n: usize,
    k: usize,
    points: usize,
    tolerances: RoundTripTolerances,
}

impl Default for RoundTripParams {
    fn default() -> Self {
        Self { base: BasePreset::Sphere, n: 2, k: 3, points: 5, tolerances: RoundTripTolerances::default() }
    }
}

#[derive(Debug, Serialize)]
struct RoundTripRow {
    preset: QPreset,
    max_error: f64,
    max_asymmetry: f64,
}

fn roundtrip_rows(p: &RoundTripParams, seed: u64) -> Result<Vec<RoundTripRow>> {
    let mut rows = Vec::new();
    for preset in [QPreset::Zero, QPreset::Constant, QPreset::Varying] {
        let cfg = BundleConfig { base: p.base, n: p.n, k: p.k, q: preset, q_scale: 0.5, warp: "g0".into(), l: 1.0 };
        let b = cfg.build()?;
        let chart = b.total_chart();
        let mut row = RoundTripRow { preset, max_error: 0.0, max_asymmetry: 0.0 };
        for i in 0..p.points {
            let x = in_ball(&mut rng_for(seed, i as u64), p.n, BASE_SAMPLE_RADIUS);
            let ex = extract_q(&chart, p.n, &x)?;
            row.max_asymmetry = row.max_asymmetry.max(ex.asymmetry_defect);
            for (got, want) in ex.as_dmatrices().iter().zip(b.connection(&x)) {
                row.max_error = row.max_error.max((got - want).amax());
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub(super) fn extract_q_roundtrip(params: Value, seed: u64) -> std::result::Result<CheckOutcome, CheckError> {
    let p: RoundTripParams = parse(params)?;
    match roundtrip_rows(&p, seed) {
        Ok(rows) => {
            let t = &p.tolerances;
            let passed = rows.iter().all(|r| r.max_error <= t.roundtrip && r.max_asymmetry <= t.asymmetry);
            outcome(passed, serde_json::json!({ "presets": rows }), t)
        }
        Err(e) => failed(e, &p.tolerances),
    }
}
