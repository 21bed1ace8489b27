//! Coefficient fields.
//!
//! Every container in this crate is generic over a [`Scalar`]. Production code
//! uses arbitrary-precision rationals ([`crate::Q`]); fixed-width rationals are
//! accepted for quick experiments where overflow is known not to occur.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, Mul, MulAssign, Neg, SubAssign};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{NumOps, One, Signed, Zero};

/// A field of characteristic zero with exact arithmetic.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + std::str::FromStr
    + Send
    + Sync
    + Zero
    + One
    + NumOps
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn from_int(v: i128) -> Self;

    /// Rough storage size, used to prefer small pivots during elimination.
    fn size_hint(&self) -> u64;

    fn is_negative(&self) -> bool;
}

impl Scalar for BigRational {
    fn from_int(v: i128) -> Self {
        Ratio::from_integer(BigInt::from(v))
    }

    fn size_hint(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

impl Scalar for Ratio<i64> {
    fn from_int(v: i128) -> Self {
        Ratio::from_integer(i64::try_from(v).expect("integer does not fit in i64"))
    }

    fn size_hint(&self) -> u64 {
        let bits = |x: i64| 64 - x.unsigned_abs().leading_zeros() as u64;
        bits(*self.numer()) + bits(*self.denom())
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

pub fn factorial_i128(k: u32) -> i128 {
    (1..=k as i128).product()
}

/// Falling factorial x(x-1)...(x-m+1); the empty product is 1.
pub fn falling_i128(x: i128, m: u32) -> i128 {
    (0..m as i128).map(|i| x - i).product()
}

/// Generalized binomial coefficient C(x, p) for any integer x and p >= 0.
pub fn binom_i128(x: i128, p: u32) -> i128 {
    falling_i128(x, p) / factorial_i128(p)
}

pub fn factorial<S: Scalar>(k: u32) -> S {
    S::from_int(factorial_i128(k))
}

pub fn binomial<S: Scalar>(x: i128, p: u32) -> S {
    S::from_int(binom_i128(x, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generalized_binomials() {
        assert_eq!(binom_i128(5, 2), 10);
        assert_eq!(binom_i128(-1, 3), -1);
        assert_eq!(binom_i128(-3, 2), 6);
        assert_eq!(binom_i128(2, 3), 0);
        assert_eq!(binom_i128(7, 0), 1);
        assert_eq!(falling_i128(4, 3), 24);
        assert_eq!(falling_i128(2, 3), 0);
    }

    #[test]
    fn integer_embedding() {
        let q: BigRational = Scalar::from_int(-12);
        assert_eq!(q.to_string(), "-12");
        let r: Ratio<i64> = Scalar::from_int(7);
        assert_eq!(r, Ratio::from_integer(7));
        assert!(Scalar::is_negative(&q));
    }
}
