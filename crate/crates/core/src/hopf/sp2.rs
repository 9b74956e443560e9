use nalgebra::DMatrix;
use serde::Serialize;

use super::{hopf_map, Fibration};
use crate::error::{GeomError, Result};
use crate::numerics::linalg::{least_squares, norm};
use crate::numerics::sampling::{normal_vec, rng_for, unit_vec, SampleRng};
use crate::numerics::{fd_directional, FdPolicy, Quaternion};

/// A 2×2 quaternion matrix acting on row vectors `(q₁, q₂)` from the right.
pub type QuatMatrix = [[Quaternion; 2]; 2];

pub fn qm_mul(a: &QuatMatrix, b: &QuatMatrix) -> QuatMatrix {
    let mut out = [[Quaternion::ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn qm_conj_transpose(a: &QuatMatrix) -> QuatMatrix {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn qm_bracket(a: &QuatMatrix, b: &QuatMatrix) -> QuatMatrix {
    let (ab, ba) = (qm_mul(a, b), qm_mul(b, a));
    let mut out = ab;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = ab[i][j] - ba[i][j];
        }
    }
    out
}

fn qm_max_abs(a: &QuatMatrix) -> f64 {
    a.iter().flatten().map(|q| q.norm()).fold(0.0, f64::max)
}

/// `x · A` for `x = (q₁, q₂)` in `ℍ² = ℝ⁸`.
pub fn right_act(x: &[f64], a: &QuatMatrix) -> Vec<f64> {
    let fb = Fibration::Quaternionic;
    let (q1, q2) = fb.split(x);
    fb.join(q1 * a[0][0] + q2 * a[1][0], q1 * a[0][1] + q2 * a[1][1])
}

fn random_quat(rng: &mut SampleRng) -> Quaternion {
    Quaternion::from_slice(&normal_vec(rng, 4))
}

/// An element of `Sp(2)`: rows orthonormalized in `ℍ²`.
pub fn random_sp2(rng: &mut SampleRng) -> QuatMatrix {
    let u = unit_vec(rng, 8);
    let r1 = [Quaternion::from_slice(&u[..4]), Quaternion::from_slice(&u[4..])];
    let v = [random_quat(rng), random_quat(rng)];
    let c = v[0] * r1[0].conj() + v[1] * r1[1].conj();
    let w = [v[0] - c * r1[0], v[1] - c * r1[1]];
    let n = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
    [r1, [w[0].scale(1.0 / n), w[1].scale(1.0 / n)]]
}

/// An element of `sp(2)`: `B + B̄ᵀ = 0`.
pub fn random_sp2_alg(rng: &mut SampleRng) -> QuatMatrix {
    let imag = |rng: &mut SampleRng| {
        let v = normal_vec(rng, 3);
        Quaternion::new(0.0, v[0], v[1], v[2])
    };
    let b = random_quat(rng);
    [[imag(rng), b], [-b.conj(), imag(rng)]]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InducedMap {
    /// Row-major 5×5 matrix.
    pub matrix: Vec<Vec<f64>>,
    pub residual: f64,
    /// `|γγᵀ − I|` for the group map, `|γ + γᵀ|` for the algebra map.
    pub structure_defect: f64,
}

impl InducedMap {
    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(5, 5, |i, j| self.matrix[i][j])
    }
}

const SAMPLE_POINTS: usize = 32;
const SAMPLE_SEED: u64 = 0x5EED;

fn solve(rows: impl Fn(&[f64]) -> Result<Vec<f64>>, tolerance: f64) -> Result<(DMatrix<f64>, f64)> {
    let fb = Fibration::Quaternionic;
    let mut xs = DMatrix::zeros(SAMPLE_POINTS, 5);
    let mut ys = DMatrix::zeros(SAMPLE_POINTS, 5);
    for i in 0..SAMPLE_POINTS {
        let x = unit_vec(&mut rng_for(SAMPLE_SEED, i as u64), 8);
        let fx = hopf_map(fb, &x);
        let y = rows(&x)?;
        for j in 0..5 {
            xs[(i, j)] = fx[j];
            ys[(i, j)] = y[j];
        }
    }
    let g = least_squares(&xs, &ys)
        .ok_or_else(|| GeomError::Infeasible("least-squares system for γ is singular".into()))?;
    let residual = (&xs * &g - &ys).amax();
    if !(residual <= tolerance) {
        return Err(GeomError::Residual { residual, tolerance });
    }
    Ok((g, residual))
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn require_quaternionic(fb: Fibration) -> Result<()> {
    if fb != Fibration::Quaternionic {
        return Err(GeomError::Precondition("γ is defined for the quaternionic fibration".into()));
    }
    Ok(())
}

/// `γ(A) ∈ SO(5)` with `f(x · A) = f(x) · γ(A)`, fitted over sample points.
pub fn induced_so5(fb: Fibration, a: &QuatMatrix) -> Result<InducedMap> {
    require_quaternionic(fb)?;
    let mut defect = qm_mul(a, &qm_conj_transpose(a));
    defect[0][0] = defect[0][0] - Quaternion::ONE;
    defect[1][1] = defect[1][1] - Quaternion::ONE;
    if qm_max_abs(&defect) > 1e-10 {
        return Err(GeomError::Precondition(format!("A is not in Sp(2): |AĀᵀ − I| = {}", qm_max_abs(&defect))));
    }
    let (g, residual) = solve(|x| Ok(hopf_map(fb, &right_act(x, a))), 1e-8)?;
    let structure_defect = (&g * g.transpose() - DMatrix::<f64>::identity(5, 5)).amax();
    Ok(InducedMap { matrix: rows_of(&g), residual, structure_defect })
}

/// `γ_*(B) ∈ so(5)` with `df_x(x · B) = f(x) · γ_*(B)`, fitted from FD
/// differentials.
pub fn induced_so5_alg(fb: Fibration, b: &QuatMatrix) -> Result<InducedMap> {
    require_quaternionic(fb)?;
    let mut sum = qm_conj_transpose(b);
    for i in 0..2 {
        for j in 0..2 {
            sum[i][j] = sum[i][j] + b[i][j];
        }
    }
    if qm_max_abs(&sum) > 1e-10 {
        return Err(GeomError::Precondition(format!("B is not in sp(2): |B + B̄ᵀ| = {}", qm_max_abs(&sum))));
    }
    let policy = FdPolicy::default();
    let (g, residual) = solve(
        |x| {
            let w = right_act(x, b);
            let len = norm(&w);
            if len == 0.0 {
                return Ok(vec![0.0; 5]);
            }
            let unit: Vec<f64> = w.iter().map(|c| c / len).collect();
            let d = fd_directional(|z| Ok(hopf_map(fb, z)), x, &unit, policy)?;
            Ok(d.iter().map(|c| c * len).collect())
        },
        1e-6,
    )?;
    let structure_defect = (&g + g.transpose()).amax();
    Ok(InducedMap { matrix: rows_of(&g), residual, structure_defect })
}
