//! The Hopf fibrations `S³ → S²` and `S⁷ → S⁴` as quotients by the unit
//! complex numbers and unit quaternions acting on the left.

mod quotient;
mod sp2;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::numerics::linalg::{dot, gram_schmidt, norm};
use crate::numerics::{Quaternion, SymMatrix};

pub use quotient::{
    from_stereo, oneill_pair, projected_length, quotient_metric_chart, section, to_stereo, OneillSample,
};
pub use sp2::{
    induced_so5, induced_so5_alg, qm_bracket, qm_conj_transpose, qm_mul, random_sp2, random_sp2_alg, right_act,
    InducedMap, QuatMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fibration {
    #[serde(rename = "s3")]
    Complex,
    #[serde(rename = "s7")]
    Quaternionic,
}

impl Fibration {
    /// Real dimension of the scalars, 2 or 4.
    pub fn scalar_dim(self) -> usize {
        match self {
            Fibration::Complex => 2,
            Fibration::Quaternionic => 4,
        }
    }

    pub fn ambient_dim(self) -> usize {
        2 * self.scalar_dim()
    }

    pub fn target_dim(self) -> usize {
        self.scalar_dim() + 1
    }

    pub fn fiber_dim(self) -> usize {
        self.scalar_dim() - 1
    }

    /// Imaginary units generating the acting group.
    pub fn generators(self) -> &'static [Quaternion] {
        match self {
            Fibration::Complex => &[Quaternion::I],
            Fibration::Quaternionic => &[Quaternion::I, Quaternion::J, Quaternion::K],
        }
    }

    fn scalar(self, s: &[f64]) -> Quaternion {
        match self {
            Fibration::Complex => Quaternion::new(s[0], s[1], 0.0, 0.0),
            Fibration::Quaternionic => Quaternion::from_slice(s),
        }
    }

    fn put(self, q: Quaternion, out: &mut Vec<f64>) {
        out.extend_from_slice(&q.to_array()[..self.scalar_dim()]);
    }

    /// Splits an ambient vector into its two scalar components.
    pub fn split(self, x: &[f64]) -> (Quaternion, Quaternion) {
        let d = self.scalar_dim();
        (self.scalar(&x[..d]), self.scalar(&x[d..2 * d]))
    }

    pub fn join(self, q1: Quaternion, q2: Quaternion) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.ambient_dim());
        self.put(q1, &mut out);
        self.put(q2, &mut out);
        out
    }

    /// `g · (q₁, q₂) = (g q₁, g q₂)`.
    pub fn act(self, g: Quaternion, x: &[f64]) -> Vec<f64> {
        let (q1, q2) = self.split(x);
        self.join(g * q1, g * q2)
    }
}

/// `F(q₁, q₂) = (2 q̄₁ q₂, |q₁|² − |q₂|²)` divided by `|x|`, with `f(0) = 0`.
pub fn hopf_map(fb: Fibration, x: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), fb.ambient_dim(), "ambient vector has the wrong length");
    let r = norm(x);
    if r == 0.0 {
        return vec![0.0; fb.target_dim()];
    }
    let (q1, q2) = fb.split(x);
    let mut out = Vec::with_capacity(fb.target_dim());
    fb.put((q1.conj() * q2).scale(2.0 / r), &mut out);
    out.push((q1.norm_sqr() - q2.norm_sqr()) / r);
    out
}

fn check_unit(x: &[f64]) -> Result<()> {
    let r = norm(x);
    if (r - 1.0).abs() > 1e-10 {
        return Err(GeomError::Precondition(format!("expected a unit vector, |x| = {r}")));
    }
    Ok(())
}

/// `ξ · x` for each generator `ξ`; an orthonormal basis of the orbit's
/// tangent space at a unit `x`.
pub fn orbit_tangent(fb: Fibration, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_unit(x)?;
    Ok(fb.generators().iter().map(|&g| fb.act(g, x)).collect())
}

/// Orthonormal basis of the complement of `x` and its orbit directions.
pub fn horizontal_space(fb: Fibration, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    let mut vecs = vec![x.to_vec()];
    vecs.extend(orbit_tangent(fb, x)?);
    let skip = vecs.len();
    let m = fb.ambient_dim();
    for i in 0..m {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        vecs.push(e);
    }
    let basis = gram_schmidt(&SymMatrix::identity(m), &vecs, 1e-8);
    Ok(basis[skip..].to_vec())
}

/// Removes the radial and orbit components of `v` at the unit point `x`.
pub fn horizontal_part(fb: Fibration, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    let mut dirs = vec![x.to_vec()];
    dirs.extend(orbit_tangent(fb, x)?);
    for d in dirs {
        let c = dot(&out, &d);
        out.iter_mut().zip(&d).for_each(|(o, di)| *o -= c * di);
    }
    Ok(out)
}
