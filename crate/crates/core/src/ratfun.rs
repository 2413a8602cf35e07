//! Rational functions in canonical form: numerator and denominator coprime,
//! denominator monic (its grlex-leading coefficient is one).

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::field::{Coefficient, Field};
use crate::poly::{forward_owned_binop, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalFunctionError {
    #[error("division by the zero rational function")]
    DivisionByZero,
    #[error("denominator vanishes at the evaluation point")]
    SingularPoint,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalFunction<C> {
    num: Polynomial<C>,
    den: Polynomial<C>,
}

impl<C: Coefficient> RationalFunction<C> {
    /// Builds `num / den` and reduces it to canonical form.
    pub fn new(num: Polynomial<C>, den: Polynomial<C>) -> Result<Self, RationalFunctionError> {
        if den.is_zero() {
            return Err(RationalFunctionError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Polynomial<C>, den: Polynomial<C>) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_one() {
                (num, den)
            } else {
                (
                    num.exact_div(&g).expect("gcd divides"),
                    den.exact_div(&g).expect("gcd divides"),
                )
            }
        };
        Self::normalize(num, den)
    }

    fn normalize(num: Polynomial<C>, den: Polynomial<C>) -> Self {
        let lc = den.leading_coefficient();
        if lc.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = C::one() / lc;
            RationalFunction {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn from_polynomial(p: Polynomial<C>) -> Self {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn constant(c: C) -> Self {
        Self::from_polynomial(Polynomial::constant(c))
    }

    pub fn from_integer(n: i64) -> Self {
        Self::constant(C::from_i64(n).expect("integer fits the coefficient field"))
    }

    pub fn var(index: usize) -> Self {
        Self::from_polynomial(Polynomial::var(index))
    }

    pub fn numerator(&self) -> &Polynomial<C> {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial<C> {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<C> {
        if self.is_polynomial() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn var_bound(&self) -> usize {
        self.num.var_bound().max(self.den.var_bound())
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, RationalFunctionError> {
        let inv = rhs.inverse().ok_or(RationalFunctionError::DivisionByZero)?;
        Ok(self * &inv)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        RationalFunction {
            num: self.num.pow(exp),
            den: self.den.pow(exp),
        }
    }

    /// Partial derivative by the quotient rule, reduced.
    pub fn derivative(&self, var: usize) -> Self {
        if self.is_polynomial() {
            return Self::from_polynomial(self.num.derivative(var));
        }
        let dn = self.num.derivative(var);
        let dd = self.den.derivative(var);
        if dd.is_zero() {
            return Self::reduce(dn, self.den.clone());
        }
        // (n/d)' = (n' d/s - n d'/s) / (d d/s) with s = gcd(d, d')
        let s = self.den.gcd(&dd);
        let (ds, dds) = (
            self.den.exact_div(&s).expect("gcd divides"),
            dd.exact_div(&s).expect("gcd divides"),
        );
        let top = &(&dn * &ds) - &(&self.num * &dds);
        if top.is_zero() {
            return Self::zero();
        }
        Self::reduce(top, &self.den * &ds)
    }

    pub fn eval(&self, point: &[C]) -> Result<C, RationalFunctionError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(RationalFunctionError::SingularPoint);
        }
        Ok(self.num.eval(point) / d)
    }

    /// Writes the function in the expression grammar.
    pub fn write_with(&self, names: &[String], out: &mut String) {
        if self.is_polynomial() {
            self.num.write_with(names, out);
        } else {
            out.push('(');
            self.num.write_with(names, out);
            out.push_str(")/(");
            self.den.write_with(names, out);
            out.push(')');
        }
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        let mut s = String::new();
        self.write_with(names, &mut s);
        s
    }
}

impl<C: Coefficient> Zero for RationalFunction<C> {
    fn zero() -> Self {
        RationalFunction {
            num: Polynomial::zero(),
            den: Polynomial::one(),
        }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<C: Coefficient> One for RationalFunction<C> {
    fn one() -> Self {
        Self::from_polynomial(Polynomial::one())
    }
}

impl<C: Coefficient> From<Polynomial<C>> for RationalFunction<C> {
    fn from(p: Polynomial<C>) -> Self {
        Self::from_polynomial(p)
    }
}

impl<C: Coefficient> Add for &RationalFunction<C> {
    type Output = RationalFunction<C>;
    fn add(self, rhs: Self) -> RationalFunction<C> {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.is_polynomial() {
                return RationalFunction::from_polynomial(num);
            }
            return RationalFunction::reduce(num, self.den.clone());
        }
        // with g = gcd(b, d): a/b + c/d = (a d/g + c b/g) / (b d/g), and any
        // common factor of that fraction divides g
        let g = self.den.gcd(&rhs.den);
        let b1 = self.den.exact_div(&g).expect("gcd divides");
        let d1 = rhs.den.exact_div(&g).expect("gcd divides");
        let num = &(&self.num * &d1) + &(&rhs.num * &b1);
        if num.is_zero() {
            return RationalFunction::zero();
        }
        if g.is_one() {
            return RationalFunction::normalize(num, &self.den * &rhs.den);
        }
        let t = num.gcd(&g);
        let den = &b1 * &rhs.den.exact_div(&t).expect("gcd divides");
        RationalFunction::normalize(num.exact_div(&t).expect("gcd divides"), den)
    }
}

impl<C: Coefficient> Sub for &RationalFunction<C> {
    type Output = RationalFunction<C>;
    fn sub(self, rhs: Self) -> RationalFunction<C> {
        self + &(-rhs)
    }
}

impl<C: Coefficient> Mul for &RationalFunction<C> {
    type Output = RationalFunction<C>;
    fn mul(self, rhs: Self) -> RationalFunction<C> {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        if self.is_polynomial() && rhs.is_polynomial() {
            return RationalFunction::from_polynomial(&self.num * &rhs.num);
        }
        // cross-cancel so the product is already coprime
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let a = self.num.exact_div(&g1).expect("gcd divides");
        let d = rhs.den.exact_div(&g1).expect("gcd divides");
        let c = rhs.num.exact_div(&g2).expect("gcd divides");
        let b = self.den.exact_div(&g2).expect("gcd divides");
        RationalFunction::normalize(&a * &c, &b * &d)
    }
}

impl<C: Coefficient> Div for &RationalFunction<C> {
    type Output = RationalFunction<C>;
    /// Panics on a zero divisor; see [`RationalFunction::checked_div`].
    fn div(self, rhs: Self) -> RationalFunction<C> {
        self.checked_div(rhs).expect("division by the zero rational function")
    }
}

impl<C: Coefficient> Neg for &RationalFunction<C> {
    type Output = RationalFunction<C>;
    fn neg(self) -> RationalFunction<C> {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl<C: Coefficient> Neg for RationalFunction<C> {
    type Output = RationalFunction<C>;
    fn neg(self) -> RationalFunction<C> {
        -&self
    }
}

forward_owned_binop!(RationalFunction, Add, add);
forward_owned_binop!(RationalFunction, Sub, sub);
forward_owned_binop!(RationalFunction, Mul, mul);
forward_owned_binop!(RationalFunction, Div, div);

impl<C: Coefficient> Field for RationalFunction<C> {
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(RationalFunction::normalize(self.den.clone(), self.num.clone()))
        }
    }

    fn pivot_cost(&self) -> usize {
        let size = |p: &Polynomial<C>| p.num_terms() * (1 + p.total_degree() as usize);
        size(&self.num) + size(&self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    type R = RationalFunction<Rational>;

    fn x() -> R {
        R::var(0)
    }
    fn n(k: i64) -> R {
        R::from_integer(k)
    }

    #[test]
    fn gcd_reduction_gives_one() {
        assert_eq!(&x() / &x(), R::one());
    }

    #[test]
    fn derivative_over_repeated_factor() {
        // ((x + 1)/x^2)' = -(x + 2)/x^3
        let f = &(&x() + &n(1)) / &(&x() * &x());
        let expected = &(&n(0) - &(&x() + &n(2))) / &(&(&x() * &x()) * &x());
        assert_eq!(f.derivative(0), expected);
    }

    #[test]
    fn reciprocal_of_one_plus_x_squared() {
        let d = &n(1) + &(&x() * &x());
        let r = &n(1) / &d;
        assert_eq!(r.numerator(), &Polynomial::one());
        assert_eq!(r.denominator(), d.numerator());
    }

    #[test]
    fn derivative_in_a_variable_absent_from_the_denominator_is_reduced() {
        // d/dx (xy + 1)/y = 1
        let y = R::var(1);
        let f = &(&(&x() * &y) + &n(1)) / &y;
        assert_eq!(f.derivative(0), R::one());
        let g = &n(-1) / &(&y * &y);
        assert_eq!(g.derivative(0), R::zero());
        assert_eq!(g.derivative(0).denominator(), &Polynomial::one());
    }

    #[test]
    fn quotient_rule() {
        // d/dx 1/(1+x^2) = -2x/(1+x^2)^2
        let d = &n(1) + &(&x() * &x());
        let f = &n(1) / &d;
        let expected = &(&n(-2) * &x()) / &(&d * &d);
        assert_eq!(f.derivative(0), expected);
    }

    #[test]
    fn denominators_are_monic() {
        let f = &x() / &(&n(2) * &x() + n(4));
        assert!(f.denominator().leading_coefficient().is_one());
        let g = &(&n(-1) * &x()) / &(&n(-1) * &x() - n(2));
        assert_eq!(g, &x() / &(&x() + &n(2)));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(x().checked_div(&R::zero()), Err(RationalFunctionError::DivisionByZero));
        assert!(R::new(Polynomial::one(), Polynomial::zero()).is_err());
    }

    #[test]
    fn singular_evaluation() {
        let f = &n(1) / &x();
        assert_eq!(f.eval(&[Rational::zero()]), Err(RationalFunctionError::SingularPoint));
    }
}
