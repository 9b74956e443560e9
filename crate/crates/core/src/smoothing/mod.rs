//! One-dimensional warp profiles: the cubic `g₀(r) = r − r³`, normalized
//! mollifiers, convolution smoothing, the family `g_ε`, and the shape checks
//! that the conic and bundle metrics rely on.

mod geps;
mod mollify;
pub mod poly;
mod shape;
pub mod spline;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{GeomError, Result};

pub use geps::{build_g_eps, GEpsLayout};
pub use mollify::{convolve, mollifier, DEFAULT_CONVOLUTION_GRID};
pub use shape::{check_shape_conditions, lemma13_check, profile_table_csv, Lemma13Verdict, ShapeReport};

/// Value and first three derivatives of a profile at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet {
    pub fn new(value: f64, d1: f64, d2: f64, d3: f64) -> Self {
        Self { value, d1, d2, d3 }
    }

    pub fn channel(&self, k: usize) -> f64 {
        [self.value, self.d1, self.d2, self.d3][k]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    ClosedForm,
    MollifiedPiecewise,
    SplineSampled,
}

/// Evaluator behind a [`SmoothFunction1D`].
pub trait ProfileEval: Send + Sync {
    fn jet(&self, r: f64) -> Jet;

    /// `(g'''(0), g⁽⁵⁾(0))` for profiles that are odd near the origin with
    /// `g'(0) = 1`.
    fn tip_series(&self) -> Option<(f64, f64)> {
        None
    }

    /// Exact `(g(r)²/r² − 1)/r²` where the representation allows it.
    fn exact_sphere_factor(&self, _r: f64) -> Option<f64> {
        None
    }

    /// Radius of the innermost piece on which the profile is a single
    /// closed-form expression, when that is much smaller than the domain.
    fn tip_scale(&self) -> Option<f64> {
        None
    }
}

/// Below this radius the sphere factor switches to the tip series.
pub const TIP_SERIES_RADIUS: f64 = 1e-4;

/// A real function of one variable with derivatives up to order three.
#[derive(Clone)]
pub struct SmoothFunction1D {
    name: String,
    domain: (f64, f64),
    right_open: bool,
    repr: Representation,
    eval: Arc<dyn ProfileEval>,
}

impl fmt::Debug for SmoothFunction1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFunction1D")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("repr", &self.repr)
            .finish()
    }
}

impl SmoothFunction1D {
    pub fn new(
        name: impl Into<String>,
        domain: (f64, f64),
        right_open: bool,
        repr: Representation,
        eval: Arc<dyn ProfileEval>,
    ) -> Self {
        Self { name: name.into(), domain, right_open, repr, eval }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn contains(&self, r: f64) -> bool {
        let (a, b) = self.domain;
        r >= a && (r < b || (!self.right_open && r <= b))
    }

    fn check(&self, r: f64) -> Result<()> {
        if self.contains(r) {
            Ok(())
        } else {
            Err(GeomError::Domain {
                at: vec![r],
                reason: format!("profile {} is defined on {:?}", self.name, self.domain),
            })
        }
    }

    pub fn jet(&self, r: f64) -> Result<Jet> {
        self.check(r)?;
        Ok(self.eval.jet(r))
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        self.jet(r).map(|j| j.value)
    }

    pub fn tip_series(&self) -> Option<(f64, f64)> {
        self.eval.tip_series()
    }

    pub fn tip_scale(&self) -> Option<f64> {
        self.eval.tip_scale()
    }

    /// `g'''(0)`, from the tip series or a direct evaluation at the origin.
    pub fn third_derivative_at_zero(&self) -> Result<f64> {
        match self.eval.tip_series() {
            Some((a, _)) => Ok(a),
            None => self.jet(0.0).map(|j| j.d3),
        }
    }

    /// `ψ(r) = (g(r)²/r² − 1)/r²`, the coefficient that turns the conic tensor
    /// into `I + ψ(r)(r² I − x xᵀ)`. Smooth in `r²` for odd profiles.
    pub fn sphere_factor(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        if let Some(v) = self.eval.exact_sphere_factor(r) {
            return Ok(v);
        }
        if r < TIP_SERIES_RADIUS {
            return match self.eval.tip_series() {
                Some((a, b)) => Ok(a / 3.0 + (a * a / 36.0 + b / 60.0) * r * r),
                None => Err(GeomError::Domain {
                    at: vec![r],
                    reason: format!("profile {} has no tip expansion", self.name),
                }),
            };
        }
        let q = self.eval.jet(r).value / r;
        Ok((q * q - 1.0) / (r * r))
    }
}

struct ClosedForm {
    f: Box<dyn Fn(f64) -> Jet + Send + Sync>,
    tip: Option<(f64, f64)>,
    sphere: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl ProfileEval for ClosedForm {
    fn jet(&self, r: f64) -> Jet {
        (self.f)(r)
    }
    fn tip_series(&self) -> Option<(f64, f64)> {
        self.tip
    }
    fn exact_sphere_factor(&self, r: f64) -> Option<f64> {
        self.sphere.as_ref().map(|s| s(r))
    }
}

pub(crate) fn closed_form(
    name: &str,
    domain: (f64, f64),
    right_open: bool,
    f: impl Fn(f64) -> Jet + Send + Sync + 'static,
    tip: Option<(f64, f64)>,
) -> SmoothFunction1D {
    SmoothFunction1D::new(
        name,
        domain,
        right_open,
        Representation::ClosedForm,
        Arc::new(ClosedForm { f: Box::new(f), tip, sphere: None }),
    )
}

pub(crate) fn g0_jet(r: f64) -> Jet {
    Jet::new(r - r * r * r, 1.0 - 3.0 * r * r, -6.0 * r, -6.0)
}

/// Closed-form `g₀(r) = r − r³` and derivatives for `0 ≤ r < 1/2`.
pub fn g0_eval(r: f64) -> Result<Jet> {
    if (0.0..0.5).contains(&r) {
        Ok(g0_jet(r))
    } else {
        Err(GeomError::Domain { at: vec![r], reason: "g0 is defined on [0, 1/2)".into() })
    }
}

pub fn g0() -> SmoothFunction1D {
    SmoothFunction1D::new(
        "g0",
        (0.0, 0.5),
        true,
        Representation::ClosedForm,
        Arc::new(ClosedForm {
            f: Box::new(g0_jet),
            tip: Some((-6.0, 0.0)),
            sphere: Some(Box::new(|r| r * r - 2.0)),
        }),
    )
}

/// `g(r) = r`: the flat cone.
pub fn linear() -> SmoothFunction1D {
    SmoothFunction1D::new(
        "linear",
        (0.0, f64::INFINITY),
        true,
        Representation::ClosedForm,
        Arc::new(ClosedForm {
            f: Box::new(|r| Jet::new(r, 1.0, 0.0, 0.0)),
            tip: Some((0.0, 0.0)),
            sphere: Some(Box::new(|_| 0.0)),
        }),
    )
}

/// `g(r) = sin r` on `[0, π/2)`: the round sphere.
pub fn sine() -> SmoothFunction1D {
    closed_form(
        "sin",
        (0.0, std::f64::consts::FRAC_PI_2),
        true,
        |r| Jet::new(r.sin(), r.cos(), -r.sin(), -r.cos()),
        Some((-1.0, 1.0)),
    )
}

/// Resolves a profile by its configuration name: `g0`, `geps:<ε>`, `linear`, `sin`.
pub fn profile_by_name(name: &str) -> Result<SmoothFunction1D> {
    match name {
        "g0" => Ok(g0()),
        "linear" => Ok(linear()),
        "sin" => Ok(sine()),
        other => match other.strip_prefix("geps:") {
            Some(eps) => {
                let eps: f64 = eps
                    .parse()
                    .map_err(|_| GeomError::Precondition(format!("cannot parse ε in profile name {other:?}")))?;
                build_g_eps(eps)
            }
            None => Err(GeomError::Precondition(format!("unknown profile {other:?}"))),
        },
    }
}
