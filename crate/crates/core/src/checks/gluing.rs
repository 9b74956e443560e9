use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{failed, outcome, parse, CheckError, CheckOutcome};
use crate::error::Result;
use crate::gluing::{
    build_cutoff, convexity_defect, glued_positivity_demo, radial_cutoff_check, scene_metrics, GluingReport,
    GluingScene, RadialCutoffReport,
};
use crate::numerics::sampling::{rng_for, uniform};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GluingTolerances {
    pub gradient_slack: f64,
    pub hessian_slack: f64,
    pub convexity: f64,
}

impl Default for GluingTolerances {
    fn default() -> Self {
        Self { gradient_slack: 1e-6, hessian_slack: 1e-5, convexity: 1e-4 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct GluingParams {
    scene: GluingScene,
    cutoff_samples: usize,
    radial_dimensions: Vec<usize>,
    tolerances: GluingTolerances,
}

impl Default for GluingParams {
    fn default() -> Self {
        Self {
            scene: GluingScene::default(),
            cutoff_samples: 1000,
            radial_dimensions: vec![2, 4],
            tolerances: GluingTolerances::default(),
        }
    }
}

#[derive(Debug, Serialize)]
struct CutoffRow {
    eps: f64,
    lambda: f64,
    ln_delta1: f64,
    delta2: f64,
    max_x_dphi: f64,
    max_x2_d2phi: f64,
    radial: Vec<RadialCutoffReport>,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct GluingDetails {
    cutoffs: Vec<CutoffRow>,
    convexity_max_defect: f64,
    demo: GluingReport,
}

fn cutoff_row(eps: f64, p: &GluingParams, seed: u64) -> Result<CutoffRow> {
    let c = build_cutoff(eps)?;
    let mut rng = rng_for(seed, 0);
    let (lo, hi) = (c.ln_delta1 - 1.0, (2.0 * eps).ln());
    let (mut d1_max, mut d2_max) = (0.0_f64, 0.0_f64);
    for _ in 0..p.cutoff_samples {
        let [_, d1, d2] = c.scaled_jet(uniform(&mut rng, lo, hi).exp());
        d1_max = d1_max.max(d1.abs());
        d2_max = d2_max.max(d2.abs());
    }
    let radial = p
        .radial_dimensions
        .iter()
        .map(|&n| radial_cutoff_check(&c, n, p.cutoff_samples, seed))
        .collect::<Result<Vec<_>>>()?;
    let t = &p.tolerances;
    let passed = d1_max <= eps
        && d2_max <= eps
        && radial.iter().all(|r| r.gradient_term <= eps + t.gradient_slack && r.hessian_term <= 2.0 * eps + t.hessian_slack);
    Ok(CutoffRow {
        eps,
        lambda: c.lambda,
        ln_delta1: c.ln_delta1,
        delta2: c.delta2,
        max_x_dphi: d1_max,
        max_x2_d2phi: d2_max,
        radial,
        passed,
    })
}

fn gluing_details(p: &GluingParams, seed: u64) -> Result<GluingDetails> {
    let mut scene = p.scene.clone();
    scene.scan.seed = seed;
    let cutoffs = scene.schedule.iter().map(|&e| cutoff_row(e, p, seed)).collect::<Result<Vec<_>>>()?;
    let sm = scene_metrics(&scene)?;
    let mut convexity: f64 = 0.0;
    for x in &sm.zero_points {
        for s in [0.0, 0.25, 0.5, 0.75, 1.0] {
            convexity = convexity.max(convexity_defect(&sm.m0, &sm.m1, x, s)?);
        }
    }
    let demo = glued_positivity_demo(&scene)?;
    Ok(GluingDetails { cutoffs, convexity_max_defect: convexity, demo })
}

pub(super) fn demo(params: Value, seed: u64) -> std::result::Result<CheckOutcome, CheckError> {
    let p: GluingParams = parse(params)?;
    match gluing_details(&p, seed) {
        Ok(d) => {
            let passed = d.cutoffs.iter().all(|c| c.passed)
                && d.convexity_max_defect <= p.tolerances.convexity
                && d.demo.passed;
            outcome(passed, d, &p.tolerances)
        }
        Err(e) => failed(e, &p.tolerances),
    }
}
