//! Seeded random polynomial objects for property tests and the acceptance
//! suite. Coefficients are small integers so exact arithmetic stays cheap.

use rand::Rng;

use crate::courant::{GeneralizedSection, Twist};
use crate::exterior::{index_tuples, DifferentialForm, VectorField};
use crate::poly::{Monomial, Polynomial};
use crate::scalar::{Patch, ScalarField};
use crate::Rational;

/// Size limits for generated objects.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_degree: u32,
    pub max_terms: usize,
    pub max_coefficient: i64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_degree: 2,
            max_terms: 3,
            max_coefficient: 3,
        }
    }
}

fn coefficient<R: Rng + ?Sized>(rng: &mut R, shape: &Shape) -> Rational {
    let c = loop {
        let c = rng.gen_range(-shape.max_coefficient..=shape.max_coefficient);
        if c != 0 {
            break c;
        }
    };
    Rational::from_integer(c.into())
}

fn monomial<R: Rng + ?Sized>(rng: &mut R, n: usize, max_degree: u32) -> Monomial {
    let total = rng.gen_range(0..=max_degree);
    let mut e = vec![0u32; n];
    for _ in 0..total {
        e[rng.gen_range(0..n)] += 1;
    }
    Monomial::from_exponents(e)
}

/// A polynomial with up to `max_terms` terms; may be zero when terms cancel.
pub fn polynomial<R: Rng + ?Sized>(rng: &mut R, patch: &Patch, shape: &Shape) -> ScalarField {
    let k = rng.gen_range(0..=shape.max_terms);
    let terms: Vec<(Monomial, Rational)> = (0..k)
        .map(|_| (monomial(rng, patch.dim(), shape.max_degree), coefficient(rng, shape)))
        .collect();
    ScalarField::from_polynomial(Polynomial::from_terms(terms))
}

/// A polynomial that is not identically zero.
pub fn nonzero_polynomial<R: Rng + ?Sized>(rng: &mut R, patch: &Patch, shape: &Shape) -> ScalarField {
    loop {
        let f = polynomial(rng, patch, shape);
        if !num_traits::Zero::is_zero(&f) {
            return f;
        }
    }
}

pub fn vector_field<R: Rng + ?Sized>(rng: &mut R, patch: &Patch, shape: &Shape) -> VectorField {
    let comps = (0..patch.dim()).map(|_| polynomial(rng, patch, shape)).collect();
    VectorField::new(patch, comps).expect("components on this patch")
}

pub fn form<R: Rng + ?Sized>(rng: &mut R, patch: &Patch, degree: usize, shape: &Shape) -> DifferentialForm {
    let terms: Vec<(Vec<usize>, ScalarField)> = index_tuples(patch.dim(), degree)
        .into_iter()
        .map(|idx| (idx, polynomial(rng, patch, shape)))
        .collect();
    DifferentialForm::from_terms(patch, degree, terms).expect("increasing tuples")
}

/// A section `X ⊕ α` with `α` a 1-form.
pub fn section<R: Rng + ?Sized>(rng: &mut R, patch: &Patch, shape: &Shape) -> GeneralizedSection {
    GeneralizedSection::new(vector_field(rng, patch, shape), form(rng, patch, 1, shape)).expect("same patch")
}

/// A closed 3-form `dB + c`, with `B` a random 2-form and `c` a constant
/// 3-form.
pub fn closed_twist<R: Rng + ?Sized>(rng: &mut R, patch: &Patch, shape: &Shape) -> Twist {
    let b = form(rng, patch, 2, shape);
    let constants = Shape {
        max_degree: 0,
        ..*shape
    };
    let c = form(rng, patch, 3, &constants);
    Twist::new(&b.exterior_derivative() + &c).expect("exact plus constant is closed")
}

/// A 3-form that is closed only by accident; used for twists expected to
/// fail integrability of graphs.
pub fn three_form<R: Rng + ?Sized>(rng: &mut R, patch: &Patch, shape: &Shape) -> DifferentialForm {
    form(rng, patch, 3, shape)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generation_is_reproducible() {
        let p = Patch::euclidean(3);
        let shape = Shape::default();
        let a = section(&mut ChaCha8Rng::seed_from_u64(7), &p, &shape);
        let b = section(&mut ChaCha8Rng::seed_from_u64(7), &p, &shape);
        assert_eq!(a, b);
    }

    #[test]
    fn twists_are_closed() {
        let p = Patch::euclidean(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let h = closed_twist(&mut rng, &p, &Shape::default());
            assert!(h.form().exterior_derivative().is_zero());
        }
    }

    #[test]
    fn degrees_respect_the_shape() {
        let p = Patch::euclidean(2);
        let shape = Shape {
            max_degree: 3,
            max_terms: 4,
            max_coefficient: 2,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let f = polynomial(&mut rng, &p, &shape);
            assert!(f.numerator().total_degree() <= 3);
            assert!(f.is_polynomial());
        }
    }
}
