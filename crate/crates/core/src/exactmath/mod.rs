//! Exact arithmetic: rationals, dense linear algebra, affine maps,
//! integer nullspaces and linear programming.

pub mod isometry;
pub mod linalg;
pub mod lp;
pub mod nullspace;
pub mod scalar;

pub use isometry::AffineMap;
pub use linalg::{gram_norm_sq, Matrix, Vector};
pub use scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactMathError {
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("rows have different lengths")]
    Ragged,
}
