use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{riemann, ChartMetric, Riemann};
use crate::numerics::linalg::{axpy, gram_schmidt};
use crate::numerics::sampling::{rng_for, unit_vec, SampleRng};
use crate::numerics::SymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub points: usize,
    pub planes_per_point: usize,
    pub refine_iterations: usize,
    pub seed: u64,
    /// A scan passes when every sampled value exceeds this.
    pub threshold: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { points: 64, planes_per_point: 24, refine_iterations: 20, seed: 0, threshold: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub check: String,
    pub samples: usize,
    pub planes_per_point: usize,
    pub refinement_iterations: usize,
    pub min_value: f64,
    pub witness_point: Vec<f64>,
    pub witness_plane: [Vec<f64>; 2],
    /// Minimum found at each sample point, in sampling order.
    pub point_minima: Vec<f64>,
    pub failed_points: usize,
    pub first_error: Option<String>,
    pub empty: bool,
    #[serde(rename = "tolerance")]
    pub threshold: f64,
    pub passed: bool,
}

struct PointResult {
    x: Vec<f64>,
    min: f64,
    plane: [Vec<f64>; 2],
}

fn orthonormal_pair(g: &SymMatrix, u: &[f64], w: &[f64]) -> Option<[Vec<f64>; 2]> {
    let mut b = gram_schmidt(g, &[u.to_vec(), w.to_vec()], 1e-8);
    if b.len() < 2 {
        return None;
    }
    let y = b.pop()?;
    let x = b.pop()?;
    Some([x, y])
}

/// Projected gradient descent of `R(X, Y, Y, X)` over `g`-orthonormal pairs
/// with step backtracking. Returns the final value and pair.
pub fn refine_plane(rm: &Riemann, g: &SymMatrix, start: [Vec<f64>; 2], iterations: usize) -> (f64, [Vec<f64>; 2]) {
    let ginv = match g.inverse() {
        Some(inv) => inv,
        None => {
            let k = rm.eval(&start[0], &start[1], &start[1], &start[0]);
            return (k, start);
        }
    };
    let [mut x, mut y] = start;
    let mut k = rm.eval(&x, &y, &y, &x);
    let mut eta = 0.5;
    for _ in 0..iterations {
        let gx = ginv.apply(&rm.grad_first(&x, &y));
        let gy = ginv.apply(&rm.grad_first(&y, &x));
        let size = (g.inner(&gx, &gx) + g.inner(&gy, &gy)).sqrt();
        if !(size > 1e-14) {
            break;
        }
        let mut improved = false;
        while eta > 1e-6 {
            let cand_x = axpy(-eta / size, &gx, &x);
            let cand_y = axpy(-eta / size, &gy, &y);
            if let Some([nx, ny]) = orthonormal_pair(g, &cand_x, &cand_y) {
                let nk = rm.eval(&nx, &ny, &ny, &nx);
                if nk < k {
                    (x, y, k) = (nx, ny, nk);
                    eta = (eta * 1.5).min(1.0);
                    improved = true;
                    break;
                }
            }
            eta *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (k, [x, y])
}

fn scan_point(m: &ChartMetric, x: Vec<f64>, rng: &mut SampleRng, cfg: &ScanConfig) -> crate::error::Result<PointResult> {
    let d = m.dim();
    let g = m.metric(&x)?;
    let rm = riemann(m, &x)?;
    let mut candidates = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            let mut u = vec![0.0; d];
            let mut w = vec![0.0; d];
            u[a] = 1.0;
            w[b] = 1.0;
            candidates.push((u, w));
        }
    }
    for _ in 0..cfg.planes_per_point {
        candidates.push((unit_vec(rng, d), unit_vec(rng, d)));
    }
    let mut best: Option<(f64, [Vec<f64>; 2])> = None;
    for (u, w) in candidates {
        if let Some(pair) = orthonormal_pair(&g, &u, &w) {
            let k = rm.eval(&pair[0], &pair[1], &pair[1], &pair[0]);
            if best.as_ref().is_none_or(|(b, _)| k < *b) {
                best = Some((k, pair));
            }
        }
    }
    let (k0, pair) = best.ok_or(crate::error::GeomError::DegeneratePlane { area: 0.0 })?;
    let (k, plane) = if cfg.refine_iterations > 0 { refine_plane(&rm, &g, pair, cfg.refine_iterations) } else { (k0, pair) };
    Ok(PointResult { x, min: k, plane })
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

/// Minimum sectional curvature over `cfg.points` sampled points. Point `i`
/// draws from the stream `(cfg.seed, i)`, so the result does not depend on
/// thread scheduling.
pub fn min_sectional_scan(
    check: &str,
    m: &ChartMetric,
    sampler: impl Fn(&mut SampleRng) -> Vec<f64> + Sync,
    cfg: &ScanConfig,
) -> CurvatureReport {
    let results: Vec<crate::error::Result<PointResult>> = (0..cfg.points)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(cfg.seed, i as u64);
            let x = sampler(&mut rng);
            scan_point(m, x, &mut rng, cfg)
        })
        .collect();
    let mut report = CurvatureReport {
        check: check.to_string(),
        samples: cfg.points,
        planes_per_point: cfg.planes_per_point,
        refinement_iterations: cfg.refine_iterations,
        min_value: f64::NAN,
        witness_point: Vec::new(),
        witness_plane: [Vec::new(), Vec::new()],
        point_minima: Vec::with_capacity(cfg.points),
        failed_points: 0,
        first_error: None,
        empty: cfg.points == 0,
        threshold: cfg.threshold,
        passed: false,
    };
    let mut best: Option<PointResult> = None;
    for r in results {
        match r {
            Ok(p) => {
                report.point_minima.push(p.min);
                let better = match &best {
                    None => true,
                    Some(b) => p.min < b.min || (p.min == b.min && lex(&p.x, &b.x) == Ordering::Less),
                };
                if better {
                    best = Some(p);
                }
            }
            Err(e) => {
                report.failed_points += 1;
                report.first_error.get_or_insert_with(|| e.to_string());
            }
        }
    }
    if let Some(b) = best {
        report.min_value = b.min;
        report.witness_point = b.x;
        report.witness_plane = b.plane;
        report.passed = report.failed_points == 0 && b.min > cfg.threshold;
    }
    report
}

/// Combines scans of disjoint pieces of one region into a single report.
pub fn merge_reports(check: &str, parts: Vec<CurvatureReport>) -> CurvatureReport {
    let threshold = parts.first().map_or(0.0, |p| p.threshold);
    let mut out = CurvatureReport {
        check: check.to_string(),
        samples: 0,
        planes_per_point: parts.first().map_or(0, |p| p.planes_per_point),
        refinement_iterations: parts.first().map_or(0, |p| p.refinement_iterations),
        min_value: f64::NAN,
        witness_point: Vec::new(),
        witness_plane: [Vec::new(), Vec::new()],
        point_minima: Vec::new(),
        failed_points: 0,
        first_error: None,
        empty: true,
        threshold,
        passed: true,
    };
    for p in parts {
        out.samples += p.samples;
        out.point_minima.extend_from_slice(&p.point_minima);
        out.failed_points += p.failed_points;
        if out.first_error.is_none() {
            out.first_error = p.first_error.clone();
        }
        if p.empty {
            continue;
        }
        out.empty = false;
        out.passed &= p.passed;
        let better = out.min_value.is_nan()
            || p.min_value < out.min_value
            || (p.min_value == out.min_value && lex(&p.witness_point, &out.witness_point) == Ordering::Less);
        if !p.min_value.is_nan() && better {
            out.min_value = p.min_value;
            out.witness_point = p.witness_point;
            out.witness_plane = p.witness_plane;
        }
    }
    out.passed &= !out.empty && out.failed_points == 0 && out.min_value > threshold;
    out
}
