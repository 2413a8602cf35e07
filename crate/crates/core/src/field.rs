//! Exact field abstractions shared by the polynomial, linear-algebra and
//! Leibniz-algebra layers.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, One, Signed, Zero};

/// A commutative field with exact, decidable equality.
///
/// `Div` may panic on a zero divisor; use [`Field::inverse`] when the divisor
/// is not known to be nonzero.
pub trait Field:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    /// Multiplicative inverse, `None` for zero.
    fn inverse(&self) -> Option<Self>;

    /// Heuristic size used to prefer cheap pivots during elimination.
    fn pivot_cost(&self) -> usize {
        0
    }
}

impl<T> Field for Ratio<T>
where
    T: Clone + Integer + Signed + Debug + Send + Sync,
{
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Coefficient field for polynomials: an exact field that can be printed,
/// hashed, parsed from decimal integers and split into sign and magnitude.
pub trait Coefficient: Field + Num + Signed + FromPrimitive + Display + Eq + Hash {}

impl<T> Coefficient for T where T: Field + Num + Signed + FromPrimitive + Display + Eq + Hash {}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn is_coefficient<C: Coefficient>() {}

    #[test]
    fn big_and_machine_rationals_are_coefficients() {
        is_coefficient::<Ratio<BigInt>>();
        is_coefficient::<Ratio<i64>>();
        is_coefficient::<Ratio<i128>>();
    }

    #[test]
    fn rational_inverse() {
        let q = Ratio::new(BigInt::from(-3), BigInt::from(4));
        assert_eq!(q.inverse().unwrap(), Ratio::new(BigInt::from(-4), BigInt::from(3)));
        assert!(Ratio::<BigInt>::zero().inverse().is_none());
    }
}
