//! Coordinate patches and the scalar ring of functions on them.
//!
//! Smooth functions are modeled by exact rational functions in the patch
//! coordinates, so every identity check reduces to a decidable zero test.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::ratfun::{RationalFunction, RationalFunctionError};
use crate::Rational;

/// A function on a patch: an element of the field Q(x_1, ..., x_n).
pub type ScalarField = RationalFunction<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatchError {
    #[error("a patch needs at least one coordinate")]
    Empty,
    #[error("`{0}` is not a valid coordinate identifier")]
    InvalidName(String),
    #[error("coordinate `{0}` is declared twice")]
    Duplicate(String),
    #[error("coordinate `d{0}` would be ambiguous with the differential of `{0}`")]
    AmbiguousDifferential(String),
    #[error("point has {found} coordinates, patch has {expected}")]
    PointDimension { expected: usize, found: usize },
}

/// A single coordinate chart with named coordinates. Cloning is cheap.
#[derive(Clone)]
pub struct Patch(Arc<[String]>);

impl Patch {
    pub fn new<I, S>(names: I) -> Result<Self, PatchError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(PatchError::Empty);
        }
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) {
                return Err(PatchError::InvalidName(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(PatchError::Duplicate(n.clone()));
            }
        }
        for n in &names {
            let d = format!("d{n}");
            if names.contains(&d) {
                return Err(PatchError::AmbiguousDifferential(n.clone()));
            }
        }
        Ok(Patch(names.into()))
    }

    /// `R^n` with coordinates `x1, ..., xn`.
    pub fn euclidean(dim: usize) -> Self {
        Patch::new((1..=dim).map(|i| format!("x{i}"))).expect("generated names are valid")
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn coordinate(&self, index: usize) -> ScalarField {
        assert!(index < self.dim(), "coordinate index out of range");
        ScalarField::var(index)
    }

    /// True if `f` only involves coordinates of this patch.
    pub fn contains(&self, f: &ScalarField) -> bool {
        f.var_bound() <= self.dim()
    }

    pub fn show<'a>(&'a self, f: &'a ScalarField) -> ShowScalar<'a> {
        ShowScalar { patch: self, value: f }
    }

    pub fn point(&self, coordinates: Vec<Rational>) -> Result<RationalPoint, PatchError> {
        if coordinates.len() != self.dim() {
            return Err(PatchError::PointDimension {
                expected: self.dim(),
                found: coordinates.len(),
            });
        }
        Ok(RationalPoint {
            patch: self.clone(),
            coordinates,
        })
    }
}

impl PartialEq for Patch {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Patch {}

impl fmt::Debug for Patch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Displays a scalar with the patch's coordinate names.
pub struct ShowScalar<'a> {
    patch: &'a Patch,
    value: &'a ScalarField,
}

impl fmt::Display for ShowScalar<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.value.to_string_with(self.patch.names()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalPoint {
    patch: Patch,
    coordinates: Vec<Rational>,
}

impl RationalPoint {
    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn coordinates(&self) -> &[Rational] {
        &self.coordinates
    }
}

pub fn partial_derivative(f: &ScalarField, index: usize) -> ScalarField {
    f.derivative(index)
}

/// Exact value of `f` at `p`; fails on the singular locus of `f`.
pub fn eval_at(f: &ScalarField, p: &RationalPoint) -> Result<Rational, RationalFunctionError> {
    f.eval(&p.coordinates)
}

pub fn is_zero(f: &ScalarField) -> bool {
    f.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_scalar;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn patch_validation() {
        assert!(Patch::new(["x", "y"]).is_ok());
        assert_eq!(Patch::new(Vec::<String>::new()), Err(PatchError::Empty));
        assert_eq!(Patch::new(["x", "x"]), Err(PatchError::Duplicate("x".into())));
        assert_eq!(
            Patch::new(["x", "dx"]),
            Err(PatchError::AmbiguousDifferential("x".into()))
        );
        assert_eq!(Patch::new(["1x"]), Err(PatchError::InvalidName("1x".into())));
    }

    #[test]
    fn evaluation_examples() {
        let p = Patch::new(["x"]).unwrap();
        let at = |v: i64| p.point(vec![q(v, 1)]).unwrap();
        assert_eq!(eval_at(&parse_scalar(&p, "x^2").unwrap(), &at(3)).unwrap(), q(9, 1));
        assert_eq!(
            eval_at(&parse_scalar(&p, "1/(1+x^2)").unwrap(), &at(1)).unwrap(),
            q(1, 2)
        );
        assert_eq!(
            eval_at(&parse_scalar(&p, "1/x").unwrap(), &at(0)),
            Err(RationalFunctionError::SingularPoint)
        );
    }

    #[test]
    fn partial_derivative_examples() {
        let p = Patch::new(["x", "y"]).unwrap();
        let f = parse_scalar(&p, "x^2*y").unwrap();
        assert_eq!(partial_derivative(&f, 0), parse_scalar(&p, "2*x*y").unwrap());
        assert!(partial_derivative(&parse_scalar(&p, "x^2").unwrap(), 1).is_zero());
        let g = parse_scalar(&p, "1/(1+x^2)").unwrap();
        assert_eq!(partial_derivative(&g, 0), parse_scalar(&p, "-2*x/(1+x^2)^2").unwrap());
    }

    #[test]
    fn point_dimension_checked() {
        let p = Patch::euclidean(2);
        assert!(matches!(p.point(vec![q(1, 1)]), Err(PatchError::PointDimension { .. })));
    }
}
