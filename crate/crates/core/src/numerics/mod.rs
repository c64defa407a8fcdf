//! Numerical foundation: small dense linear algebra, the Gamma function,
//! deterministic random streams and a tensor quadrature oracle.

pub mod linalg;
pub mod quadrature;
pub mod rng;
pub mod special;

pub use linalg::{dot, mat_vec, mat_vec_or_zero, norm, random_rotation, symmetric_eigenvalues, SpdMatrix};
pub use num_complex::Complex64;
pub use quadrature::{gauss_legendre_rule, quad_integrate, trapezoid_rule, Axis, QuadResult, QuadratureGrid, QuadratureRule};
pub use rng::RngStream;
pub use special::{gamma, log_gamma};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("pole of the Gamma function at {0}")]
    Pole(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("invalid quadrature grid: {0}")]
    InvalidGrid(String),
    #[error("quadrature grid has {nodes} nodes, above the cap of {cap}")]
    NodeCapExceeded { nodes: usize, cap: usize },
}
