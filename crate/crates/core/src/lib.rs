//! Exact symbolic computations for twisted Dirac structures on coordinate
//! patches: exterior calculus over rational-function coefficients, twisted
//! Courant and Dorfman brackets, Poisson algebras of admissible functions,
//! finite-dimensional Leibniz and Courant algebras, and Dirac actions with
//! moment maps.

pub mod actions;
pub mod courant;
pub mod dirac;
pub mod exterior;
pub mod field;
pub mod leibniz;
pub mod linalg;
pub mod parse;
pub mod poisson;
pub mod poly;
pub mod random;
pub mod ratfun;
pub mod report;
pub mod scalar;

/// Exact rational numbers with arbitrary precision.
pub type Rational = num_rational::BigRational;

pub use actions::{ActionError, ExtendedAction, InfinitesimalAction, MomentMap, PiMu};
pub use courant::{courant_bracket, dorfman, pairing, CourantError, GeneralizedSection, Twist};
pub use dirac::{DiracError, DiracStructure};
pub use exterior::{DifferentialForm, ExteriorError, LieTransport, VectorField};
pub use field::{Coefficient, Field};
pub use leibniz::{CourantAlgebraSpec, FiniteLeibnizAlgebra, FiniteLieAlgebra, GModule, LeibnizError, LinearMap};
pub use linalg::Matrix;
pub use parse::{parse_form, parse_scalar, parse_value, parse_vector_field, ParseError, Value};
pub use poisson::{AdmissibleFunction, HamiltonianSolution, PoissonError};
pub use poly::{Monomial, Polynomial};
pub use ratfun::{RationalFunction, RationalFunctionError};
pub use report::{CheckItem, Report, Verdict};
pub use scalar::{Patch, PatchError, RationalPoint, ScalarField};
