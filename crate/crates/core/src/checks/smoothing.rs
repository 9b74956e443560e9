use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{failed, outcome, parse, CheckError, CheckOutcome, OneOrMany};
use crate::error::Result;
use crate::smoothing::{build_g_eps, g0, lemma13_check};

fn default_eps() -> OneOrMany {
    OneOrMany::Many(vec![0.02, 0.05, 0.1])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Lemma12Tolerances {
    pub tip_defect: f64,
    pub concavity: f64,
    pub slope: f64,
}

impl Default for Lemma12Tolerances {
    fn default() -> Self {
        Self { tip_defect: 1e-6, concavity: 1e-8, slope: 1e-8 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct Lemma12Params {
    eps: OneOrMany,
    grid: usize,
    tolerances: Lemma12Tolerances,
}

impl Default for Lemma12Params {
    fn default() -> Self {
        Self { eps: default_eps(), grid: 1024, tolerances: Lemma12Tolerances::default() }
    }
}

#[derive(Debug, Serialize)]
struct Lemma12Row {
    eps: f64,
    tip_defect: f64,
    concavity_excess: f64,
    slope_excess: f64,
    tail_points: usize,
    tail_mismatches: usize,
    passed: bool,
}

fn lemma12_row(eps: f64, grid: usize, tol: &Lemma12Tolerances) -> Result<Lemma12Row> {
    let g = build_g_eps(eps)?;
    let base = g0();
    let tip = g.jet(0.0)?;
    let mut tip_defect = tip.value.abs().max((tip.d1 - 1.0).abs()).max(tip.d2.abs());
    for r in [1e-8, 1e-9, 1e-10] {
        let j = g.jet(r)?;
        tip_defect = tip_defect.max((j.value / r - 1.0).abs()).max((j.d1 - 1.0).abs()).max(j.d2.abs());
    }
    let (mut concavity_excess, mut slope_excess) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let (mut tail_points, mut tail_mismatches) = (0, 0);
    for i in 0..grid {
        let r = 0.5 * i as f64 / grid as f64;
        let j = g.jet(r)?;
        concavity_excess = concavity_excess.max(j.d2 + r);
        slope_excess = slope_excess.max(j.d1 - base.jet(r)?.d1);
        if r >= eps {
            tail_points += 1;
            if g.value(r)? != base.value(r)? / 2.0 {
                tail_mismatches += 1;
            }
        }
    }
    let passed = tip_defect <= tol.tip_defect
        && concavity_excess <= tol.concavity
        && slope_excess <= tol.slope
        && tail_mismatches == 0;
    Ok(Lemma12Row { eps, tip_defect, concavity_excess, slope_excess, tail_points, tail_mismatches, passed })
}

pub(super) fn lemma12(params: Value, _seed: u64) -> std::result::Result<CheckOutcome, CheckError> {
    let p: Lemma12Params = parse(params)?;
    let rows: Result<Vec<_>> = p.eps.values().iter().map(|&e| lemma12_row(e, p.grid, &p.tolerances)).collect();
    match rows {
        Ok(rows) => outcome(rows.iter().all(|r| r.passed), serde_json::json!({ "profiles": rows }), &p.tolerances),
        Err(e) => failed(e, &p.tolerances),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Lemma13Tolerances {
    /// Bound on the error of `t₀`, estimated as `|g₀(t₀) − g_ε(t)| / g₀'(t₀)`.
    pub t0: f64,
}

impl Default for Lemma13Tolerances {
    fn default() -> Self {
        Self { t0: 1e-12 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct Lemma13Params {
    eps: OneOrMany,
    samples: usize,
    t_range: (f64, f64),
    tolerances: Lemma13Tolerances,
}

impl Default for Lemma13Params {
    fn default() -> Self {
        Self { eps: default_eps(), samples: 100, t_range: (0.01, 0.33), tolerances: Lemma13Tolerances::default() }
    }
}

#[derive(Debug, Serialize)]
struct Lemma13Row {
    eps: f64,
    samples: usize,
    min_slope_margin: f64,
    min_weighted_margin: f64,
    max_t0_error: f64,
    violations: usize,
    passed: bool,
}

fn lemma13_row(eps: f64, p: &Lemma13Params) -> Result<Lemma13Row> {
    let g = build_g_eps(eps)?;
    let base = g0();
    let (lo, hi) = p.t_range;
    let mut row = Lemma13Row {
        eps,
        samples: p.samples,
        min_slope_margin: f64::INFINITY,
        min_weighted_margin: f64::INFINITY,
        max_t0_error: 0.0,
        violations: 0,
        passed: false,
    };
    for i in 0..p.samples {
        let t = lo + (hi - lo) * (i as f64 + 0.5) / p.samples as f64;
        let v = lemma13_check(&g, t)?;
        let j0 = base.jet(v.t0)?;
        let err = (j0.value - g.value(t)?).abs() / j0.d1;
        row.max_t0_error = row.max_t0_error.max(err);
        row.min_slope_margin = row.min_slope_margin.min(v.slope_margin);
        row.min_weighted_margin = row.min_weighted_margin.min(v.weighted_margin);
        if !(v.slope_bound && v.weighted_bound) {
            row.violations += 1;
        }
    }
    row.passed = row.violations == 0 && row.max_t0_error <= p.tolerances.t0;
    Ok(row)
}

pub(super) fn lemma13(params: Value, _seed: u64) -> std::result::Result<CheckOutcome, CheckError> {
    let p: Lemma13Params = parse(params)?;
    let rows: Result<Vec<_>> = p.eps.values().iter().map(|&e| lemma13_row(e, &p)).collect();
    match rows {
        Ok(rows) => outcome(rows.iter().all(|r| r.passed), serde_json::json!({ "profiles": rows }), &p.tolerances),
        Err(e) => failed(e, &p.tolerances),
    }
}
