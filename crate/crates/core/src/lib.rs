pub mod error;
pub mod gluing;
pub mod hopf;
pub mod numerics;
pub mod bundle;
pub mod checks;
pub mod conic;
pub mod curvature;
pub mod smoothing;
