//! Affine maps `x ↦ b + M x`, written `⟨b, M⟩`.

use std::fmt;
use std::ops::Mul;

use super::linalg::{Matrix, Vector};
use super::scalar::{Field, Scalar};
use super::ExactMathError;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineMap<T> {
    pub translation: Vector<T>,
    pub linear: Matrix<T>,
}

impl<T: fmt::Debug> fmt::Debug for AffineMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{:?}, {:?}⟩", self.translation, self.linear)
    }
}

impl<T: Scalar> AffineMap<T> {
    pub fn new(translation: Vector<T>, linear: Matrix<T>) -> Result<Self, ExactMathError> {
        if !linear.is_square() || linear.rows() != translation.dim() {
            return Err(ExactMathError::DimensionMismatch {
                expected: translation.dim(),
                found: linear.rows(),
            });
        }
        Ok(AffineMap { translation, linear })
    }

    pub fn identity(dim: usize) -> Self {
        AffineMap { translation: Vector::zeros(dim), linear: Matrix::identity(dim) }
    }

    pub fn translation_by(v: Vector<T>) -> Self {
        let n = v.dim();
        AffineMap { translation: v, linear: Matrix::identity(n) }
    }

    pub fn linear_only(m: Matrix<T>) -> Self {
        AffineMap { translation: Vector::zeros(m.rows()), linear: m }
    }

    pub fn dim(&self) -> usize {
        self.translation.dim()
    }

    pub fn is_identity(&self) -> bool {
        self.translation.is_zero() && self.linear.is_identity()
    }

    pub fn is_translation(&self) -> bool {
        self.linear.is_identity()
    }

    pub fn try_apply(&self, x: &Vector<T>) -> Result<Vector<T>, ExactMathError> {
        let mx = self.linear.try_mul_vec(x)?;
        Ok(&self.translation + &mx)
    }

    pub fn apply(&self, x: &Vector<T>) -> Vector<T> {
        self.try_apply(x).expect("affine map dimension mismatch")
    }

    /// Linear part only (for difference vectors).
    pub fn apply_linear(&self, v: &Vector<T>) -> Vector<T> {
        self.linear.mul_vec(v)
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn try_compose(&self, other: &Self) -> Result<Self, ExactMathError> {
        if self.dim() != other.dim() {
            return Err(ExactMathError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let t = &self.translation + &self.linear.mul_vec(&other.translation);
        Ok(AffineMap { translation: t, linear: &self.linear * &other.linear })
    }

    pub fn compose(&self, other: &Self) -> Self {
        self.try_compose(other).expect("affine map dimension mismatch")
    }
}

impl<T: Field> AffineMap<T> {
    pub fn inverse(&self) -> Result<Self, ExactMathError> {
        let inv = self.linear.inverse()?;
        let t = -&inv.mul_vec(&self.translation);
        Ok(AffineMap { translation: t, linear: inv })
    }

    /// `h ∘ self ∘ h⁻¹`.
    pub fn conjugate_by(&self, h: &Self) -> Result<Self, ExactMathError> {
        h.try_compose(self)?.try_compose(&h.inverse()?)
    }
}

impl<'a, T: Scalar> Mul<&'a AffineMap<T>> for &'a AffineMap<T> {
    type Output = AffineMap<T>;
    fn mul(self, rhs: &'a AffineMap<T>) -> AffineMap<T> {
        self.compose(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::scalar::{int, rat};
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn arb_map() -> impl Strategy<Value = AffineMap<BigRational>> {
        (
            prop::collection::vec(-3i64..=3, 4),
            prop::collection::vec((-5i64..=5, 1i64..=4), 2),
        )
            .prop_filter_map("singular", |(m, t)| {
                let lin = Matrix::from_rows(vec![
                    vec![int(m[0]), int(m[1])],
                    vec![int(m[2]), int(m[3])],
                ])
                .unwrap();
                if lin.determinant() == int(0) {
                    return None;
                }
                let tr = Vector::new(t.iter().map(|&(p, q)| rat(p, q)).collect());
                Some(AffineMap::new(tr, lin).unwrap())
            })
    }

    proptest! {
        #[test]
        fn inverse_is_two_sided(f in arb_map()) {
            let inv = f.inverse().unwrap();
            prop_assert!(f.compose(&inv).is_identity());
            prop_assert!(inv.compose(&f).is_identity());
        }

        #[test]
        fn composition_is_associative(f in arb_map(), g in arb_map(), h in arb_map()) {
            prop_assert_eq!(f.compose(&g).compose(&h), f.compose(&g.compose(&h)));
        }

        #[test]
        fn compose_agrees_with_sequential_application(f in arb_map(), g in arb_map(), x in -5i64..5, y in -5i64..5) {
            let p = Vector::new(vec![int(x), rat(y, 3)]);
            prop_assert_eq!(f.compose(&g).apply(&p), f.apply(&g.apply(&p)));
        }
    }

    #[test]
    fn conjugation_by_translation() {
        let rot = AffineMap::linear_only(
            Matrix::from_rows(vec![vec![int(0), int(-1)], vec![int(1), int(0)]]).unwrap(),
        );
        let h = AffineMap::translation_by(Vector::new(vec![rat(1, 2), rat(1, 2)]));
        let c = rot.conjugate_by(&h).unwrap();
        // Rotation about (1/2, 1/2) fixes that point.
        let centre = Vector::new(vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(c.apply(&centre), centre);
    }
}
