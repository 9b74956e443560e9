use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{GeomError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Maximum number of interval bisections before `integrate` gives up.
pub const SUBDIVISION_BUDGET: usize = 4000;

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then(other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod(f: &impl Fn(f64) -> Result<f64>, a: f64, b: f64) -> Result<Panel> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, (&x, &w)) in XGK.iter().zip(&WGK).enumerate() {
        let vals = if x == 0.0 { [f(c)?, 0.0] } else { [f(c - h * x)?, f(c + h * x)?] };
        if !vals[0].is_finite() || !vals[1].is_finite() {
            return Err(GeomError::NonFinite { at: vec![c - h * x, c + h * x] });
        }
        let s = vals[0] + vals[1];
        kronrod += w * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    Ok(Panel { a, b, value: kronrod * h, error: ((kronrod - gauss) * h).abs() })
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]` to absolute
/// tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> Result<f64>, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a > b {
        return Err(GeomError::Precondition(format!("integration bounds out of order: {a} > {b}")));
    }
    if a == b {
        return Ok(0.0);
    }
    let mut heap = BinaryHeap::new();
    let first = gauss_kronrod(&f, a, b)?;
    let mut total_err = first.error;
    heap.push(first);
    let mut splits = 0;
    while total_err > tol {
        if splits >= SUBDIVISION_BUDGET {
            return Err(GeomError::Quadrature { a, b, budget: SUBDIVISION_BUDGET });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(GeomError::Quadrature { a, b, budget: splits });
        }
        let left = gauss_kronrod(&f, worst.a, mid)?;
        let right = gauss_kronrod(&f, mid, worst.b)?;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        splits += 1;
        if splits % 64 == 0 {
            // re-sum to shed accumulated cancellation in the running estimate
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    // sum in interval order for run-to-run reproducibility
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    Ok(panels.iter().map(|p| p.value).sum())
}
