//! Shared numerical substrate: quaternions, small dense linear algebra,
//! finite differences, adaptive quadrature and seeded sampling.

pub mod fd;
pub mod linalg;
pub mod quadrature;
pub mod quaternion;
pub mod sampling;

pub use fd::{fd_derivative, fd_directional, fd_vec_derivative, FdPolicy};
pub use linalg::{sym_eig_min, SymMatrix};
pub use quadrature::integrate;
pub use quaternion::{quat_mul, Quaternion};
