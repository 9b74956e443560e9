use thiserror::Error;

/// Errors raised by the geometric constructions and the curvature oracle.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeomError {
    #[error("non-finite value at abscissa {at:?}")]
    NonFinite { at: Vec<f64> },

    #[error("point {at:?} lies outside the domain: {reason}")]
    Domain { at: Vec<f64>, reason: String },

    #[error("metric is singular at {at:?}")]
    SingularMetric { at: Vec<f64> },

    #[error("degenerate 2-plane (area form {area:e})")]
    DegeneratePlane { area: f64 },

    #[error("quadrature failed to converge on [{a}, {b}] within {budget} subdivisions")]
    Quadrature { a: f64, b: f64, budget: usize },

    #[error("bisection bracket [{lo}, {hi}] does not contain a root")]
    Bracket { lo: f64, hi: f64 },

    #[error("construction infeasible: {0}")]
    Infeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("1-jet mismatch of {defect:e} at {at:?}")]
    JetMismatch { at: Vec<f64>, defect: f64 },

    #[error("least-squares residual {residual:e} exceeds {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("geodesic left the domain at {at:?}")]
    DomainExit { at: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, GeomError>;
