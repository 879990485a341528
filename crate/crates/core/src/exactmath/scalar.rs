//! Scalar traits and rational helpers.

use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, One, Signed, Zero};

use super::ExactMathError;

/// Entry type of vectors, matrices and affine maps.
///
/// Anything that is a commutative ring with negation qualifies; the pipeline
/// itself only ever instantiates it with [`BigRational`] (and [`BigInt`] for
/// coefficient matrices), but floats work for plotting-style conversions.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Num + Neg<Output = Self> {}

impl<T> Scalar for T where T: Clone + PartialEq + fmt::Debug + Num + Neg<Output = T> {}

/// Scalars with (exact or approximate) division.
pub trait Field: Scalar {}

impl Field for BigRational {}
impl Field for Ratio<i64> {}
impl Field for Ratio<i128> {}
impl Field for f64 {}
impl Field for f32 {}

/// Shorthand for the rational `num / den`.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for the integer `n` as a rational.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Formats a rational as `"p"` or `"p/q"` in lowest terms.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p"` or `"p/q"` (q > 0). The value is reduced to lowest terms.
pub fn parse_rational(s: &str) -> Result<BigRational, ExactMathError> {
    let bad = || ExactMathError::Parse(s.to_string());
    let t = s.trim();
    match t.split_once('/') {
        None => BigInt::from_str(t).map(BigRational::from_integer).map_err(|_| bad()),
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if !q.is_positive() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
    }
}

/// Floor of a rational as a machine integer.
pub fn floor_i64(r: &BigRational) -> i64 {
    let f = r.floor().to_integer();
    i64::try_from(f).expect("cell coordinate out of i64 range")
}

/// Smallest non-negative integer `k` with `k * k >= r`.
pub fn ceil_sqrt(r: &BigRational) -> i64 {
    if !r.is_positive() {
        return 0;
    }
    // Coordinates handled here are small; a linear scan after a float guess is enough.
    let mut k = (rational_to_f64(r).sqrt().floor() as i64 - 1).max(0);
    while int(k) * int(k) < *r {
        k += 1;
    }
    k
}

/// Lossy conversion for reporting only.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Least common multiple of the denominators of `values` (1 for an empty input).
pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// True iff the rational is an integer.
pub fn is_integral(r: &BigRational) -> bool {
    r.denom().is_one()
}

/// Greatest common divisor of a list of integers (0 for all-zero input).
pub fn gcd_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values.into_iter().fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_and_parses() {
        assert_eq!(format_rational(&rat(2, 4)), "1/2");
        assert_eq!(format_rational(&rat(-6, 3)), "-2");
        assert_eq!(parse_rational("-3/9").unwrap(), rat(-1, 3));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn ceil_sqrt_is_tight() {
        assert_eq!(ceil_sqrt(&int(0)), 0);
        assert_eq!(ceil_sqrt(&int(4)), 2);
        assert_eq!(ceil_sqrt(&int(5)), 3);
        assert_eq!(ceil_sqrt(&rat(16, 3)), 3);
    }

    #[test]
    fn lcm_mixed() {
        assert_eq!(lcm_of_denominators(&[rat(1, 2), rat(1, 3), int(4)]), BigInt::from(6));
    }
}
