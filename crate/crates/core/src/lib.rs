pub mod exactmath;
pub mod netmodel;
pub mod scaffold;
pub mod touring;
pub mod synthesis;
pub mod verify;
pub mod cli;

#[cfg(test)]
pub(crate) mod testutil;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Exact rational scalar used throughout the pipeline.
pub type Rational = BigRational;
pub type FracVector = exactmath::Vector<Rational>;
pub type FracMatrix = exactmath::Matrix<Rational>;
pub type IntMatrix = exactmath::Matrix<BigInt>;
/// Affine map with rational entries; the symmetries handled here are isometries.
pub type Isometry = exactmath::AffineMap<Rational>;
