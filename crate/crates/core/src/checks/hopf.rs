use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{failed, outcome, parse, CheckError, CheckOutcome, OneOrMany};
use crate::curvature::sectional;
use crate::error::Result;
use crate::hopf::{
    horizontal_space, hopf_map, induced_so5, induced_so5_alg, oneill_pair, projected_length, qm_bracket, qm_mul,
    quotient_metric_chart, random_sp2, random_sp2_alg, Fibration, QuatMatrix,
};
use crate::numerics::linalg::norm;
use crate::numerics::sampling::{in_ball, normal_vec, rng_for, unit_vec};
use crate::numerics::{fd_directional, FdPolicy, Quaternion};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadiusHalfTolerances {
    pub invariance: f64,
    pub differential: f64,
    pub curvature: f64,
    pub length: f64,
}

impl Default for RadiusHalfTolerances {
    fn default() -> Self {
        Self { invariance: 1e-12, differential: 1e-8, curvature: 1e-3, length: 1e-3 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RadiusHalfParams {
    fibration: OneOrMany<Fibration>,
    invariance_samples: usize,
    chart_points: usize,
    tolerances: RadiusHalfTolerances,
}

impl Default for RadiusHalfParams {
    fn default() -> Self {
        Self {
            fibration: OneOrMany::Many(vec![Fibration::Complex, Fibration::Quaternionic]),
            invariance_samples: 1000,
            chart_points: 20,
            tolerances: RadiusHalfTolerances::default(),
        }
    }
}

#[derive(Debug, Serialize)]
struct RadiusHalfRow {
    fibration: Fibration,
    invariance_defect: f64,
    norm_defect: f64,
    differential_defect: f64,
    curvature_min: f64,
    curvature_max: f64,
    projected_length: f64,
    oneill_ambient: f64,
    oneill_quotient: f64,
    passed: bool,
}

fn radius_half_row(fb: Fibration, p: &RadiusHalfParams, seed: u64) -> Result<RadiusHalfRow> {
    let t = &p.tolerances;
    let m = fb.ambient_dim();
    let d = fb.scalar_dim();
    let mut rng = rng_for(seed, 0);
    let (mut invariance, mut norm_defect) = (0.0_f64, 0.0_f64);
    for _ in 0..p.invariance_samples {
        let x = normal_vec(&mut rng, m);
        let mut g = [0.0; 4];
        g[..d].copy_from_slice(&unit_vec(&mut rng, d));
        let fx = hopf_map(fb, &x);
        let fgx = hopf_map(fb, &fb.act(Quaternion::from_slice(&g), &x));
        invariance = invariance.max(fx.iter().zip(&fgx).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        norm_defect = norm_defect.max((norm(&fx) - norm(&x)).abs());
    }
    let policy = FdPolicy::default();
    let mut differential: f64 = 0.0;
    for _ in 0..p.chart_points {
        let x = unit_vec(&mut rng, m);
        for h in horizontal_space(fb, &x)? {
            let df = fd_directional(|z| Ok(hopf_map(fb, z)), &x, &h, policy)?;
            differential = differential.max((norm(&df) / norm(&h) - 2.0).abs());
        }
    }
    let chart = quotient_metric_chart(fb);
    let (mut kmin, mut kmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..p.chart_points {
        let mut r = rng_for(seed, 1 + i as u64);
        let y = in_ball(&mut r, d, 1.5);
        let k = sectional(&chart, &y, &normal_vec(&mut r, d), &normal_vec(&mut r, d))?;
        kmin = kmin.min(k);
        kmax = kmax.max(k);
    }
    let curve = |phi: f64| {
        let mut x = vec![0.0; m];
        x[0] = phi.cos();
        x[d] = phi.sin();
        x
    };
    let length = projected_length(fb, curve, 0.0, std::f64::consts::PI, 1e-10)?;
    let mut x = unit_vec(&mut rng, m);
    if hopf_map(fb, &x)[d] < 0.0 {
        x.rotate_left(d);
    }
    let h = horizontal_space(fb, &x)?;
    let on = oneill_pair(fb, &x, &h[0], &h[1])?;
    let passed = invariance <= t.invariance
        && norm_defect <= t.invariance
        && differential <= t.differential
        && (kmin - 4.0).abs() <= t.curvature
        && (kmax - 4.0).abs() <= t.curvature
        && (length - std::f64::consts::PI).abs() <= t.length
        && on.ambient <= on.quotient;
    Ok(RadiusHalfRow {
        fibration: fb,
        invariance_defect: invariance,
        norm_defect,
        differential_defect: differential,
        curvature_min: kmin,
        curvature_max: kmax,
        projected_length: length,
        oneill_ambient: on.ambient,
        oneill_quotient: on.quotient,
        passed,
    })
}

pub(super) fn radius_half(params: Value, seed: u64) -> std::result::Result<CheckOutcome, CheckError> {
    let p: RadiusHalfParams = parse(params)?;
    let rows: Result<Vec<_>> = p.fibration.values().into_iter().map(|fb| radius_half_row(fb, &p, seed)).collect();
    match rows {
        Ok(rows) => outcome(rows.iter().all(|r| r.passed), serde_json::json!({ "fibrations": rows }), &p.tolerances),
        Err(e) => failed(e, &p.tolerances),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sp2Tolerances {
    pub orthogonality: f64,
    pub homomorphism: f64,
    pub kernel: f64,
    pub algebra: f64,
}

impl Default for Sp2Tolerances {
    fn default() -> Self {
        Self { orthogonality: 1e-7, homomorphism: 1e-7, kernel: 1e-10, algebra: 1e-5 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct Sp2Params {
    pairs: usize,
    tolerances: Sp2Tolerances,
}

impl Default for Sp2Params {
    fn default() -> Self {
        Self { pairs: 10, tolerances: Sp2Tolerances::default() }
    }
}

#[derive(Debug, Serialize)]
struct Sp2Summary {
    pairs: usize,
    max_residual: f64,
    orthogonality_defect: f64,
    homomorphism_defect: f64,
    kernel_defect: f64,
    algebra_antisymmetry: f64,
    algebra_bracket_defect: f64,
}

fn sp2_summary(p: &Sp2Params, seed: u64) -> Result<Sp2Summary> {
    let fb = Fibration::Quaternionic;
    let minus: QuatMatrix = [[-Quaternion::ONE, Quaternion::ZERO], [Quaternion::ZERO, -Quaternion::ONE]];
    let id5 = DMatrix::<f64>::identity(5, 5);
    let mut s = Sp2Summary {
        pairs: p.pairs,
        max_residual: 0.0,
        orthogonality_defect: 0.0,
        homomorphism_defect: 0.0,
        kernel_defect: (induced_so5(fb, &minus)?.to_dmatrix() - &id5).amax(),
        algebra_antisymmetry: 0.0,
        algebra_bracket_defect: 0.0,
    };
    let mut rng = rng_for(seed, 0);
    for _ in 0..p.pairs {
        let (a, b) = (random_sp2(&mut rng), random_sp2(&mut rng));
        let (ga, gb, gab) = (induced_so5(fb, &a)?, induced_so5(fb, &b)?, induced_so5(fb, &qm_mul(&a, &b))?);
        s.max_residual = s.max_residual.max(ga.residual).max(gb.residual);
        s.orthogonality_defect = s.orthogonality_defect.max(ga.structure_defect).max(gb.structure_defect);
        s.homomorphism_defect =
            s.homomorphism_defect.max((gab.to_dmatrix() - ga.to_dmatrix() * gb.to_dmatrix()).amax());
        let (b1, b2) = (random_sp2_alg(&mut rng), random_sp2_alg(&mut rng));
        let (g1, g2) = (induced_so5_alg(fb, &b1)?, induced_so5_alg(fb, &b2)?);
        let g12 = induced_so5_alg(fb, &qm_bracket(&b1, &b2))?;
        let (m1, m2) = (g1.to_dmatrix(), g2.to_dmatrix());
        s.algebra_antisymmetry = s.algebra_antisymmetry.max(g1.structure_defect).max(g2.structure_defect);
        s.algebra_bracket_defect = s.algebra_bracket_defect.max((g12.to_dmatrix() - (&m1 * &m2 - &m2 * &m1)).amax());
    }
    Ok(s)
}

pub(super) fn sp2(params: Value, seed: u64) -> std::result::Result<CheckOutcome, CheckError> {
    let p: Sp2Params = parse(params)?;
    match sp2_summary(&p, seed) {
        Ok(s) => {
            let t = &p.tolerances;
            let passed = s.orthogonality_defect <= t.orthogonality
                && s.homomorphism_defect <= t.homomorphism
                && s.kernel_defect <= t.kernel
                && s.algebra_antisymmetry <= t.algebra
                && s.algebra_bracket_defect <= t.algebra;
            outcome(passed, s, t)
        }
        Err(e) => failed(e, &p.tolerances),
    }
}
