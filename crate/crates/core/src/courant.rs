//! Sections of the generalized tangent bundle `TM ⊕ Λ^k T*M`, the symmetric
//! pairing, and the twisted Dorfman and Courant brackets.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;
use thiserror::Error;

use crate::exterior::{DifferentialForm, ExteriorError, VectorField};
use crate::report::Verdict;
use crate::scalar::{Patch, ScalarField};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CourantError {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("sections of order {0} and {1} cannot be combined")]
    OrderMismatch(usize, usize),
    #[error("operation is defined on order-1 sections only, found order {0}")]
    OrderNotOne(usize),
    #[error("a twist must have degree at least 2, found {0}")]
    TwistDegree(usize),
    #[error("twist is not closed: dH = {0}")]
    NotClosed(String),
}

/// A section `X ⊕ α` with `α` of degree `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedSection {
    vector: VectorField,
    form: DifferentialForm,
}

impl GeneralizedSection {
    pub fn new(vector: VectorField, form: DifferentialForm) -> Result<Self, CourantError> {
        if vector.patch() != form.patch() {
            return Err(ExteriorError::PatchMismatch.into());
        }
        Ok(GeneralizedSection { vector, form })
    }

    pub fn zero(patch: &Patch, order: usize) -> Self {
        GeneralizedSection {
            vector: VectorField::zero(patch),
            form: DifferentialForm::zero(patch, order),
        }
    }

    pub fn from_vector(vector: VectorField, order: usize) -> Self {
        let form = DifferentialForm::zero(vector.patch(), order);
        GeneralizedSection { vector, form }
    }

    pub fn from_form(form: DifferentialForm) -> Self {
        GeneralizedSection {
            vector: VectorField::zero(form.patch()),
            form,
        }
    }

    pub fn patch(&self) -> &Patch {
        self.vector.patch()
    }

    pub fn order(&self) -> usize {
        self.form.degree()
    }

    pub fn vector(&self) -> &VectorField {
        &self.vector
    }

    pub fn form(&self) -> &DifferentialForm {
        &self.form
    }

    pub fn is_zero(&self) -> bool {
        self.vector.is_zero() && self.form.is_zero()
    }

    pub fn scale(&self, f: &ScalarField) -> Self {
        GeneralizedSection {
            vector: self.vector.scale(f),
            form: self.form.scale(f),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<(), CourantError> {
        if self.patch() != other.patch() {
            return Err(ExteriorError::PatchMismatch.into());
        }
        if self.order() != other.order() {
            return Err(CourantError::OrderMismatch(self.order(), other.order()));
        }
        Ok(())
    }
}

impl Add for &GeneralizedSection {
    type Output = GeneralizedSection;
    fn add(self, rhs: Self) -> GeneralizedSection {
        GeneralizedSection {
            vector: &self.vector + &rhs.vector,
            form: &self.form + &rhs.form,
        }
    }
}

impl Sub for &GeneralizedSection {
    type Output = GeneralizedSection;
    fn sub(self, rhs: Self) -> GeneralizedSection {
        GeneralizedSection {
            vector: &self.vector - &rhs.vector,
            form: &self.form - &rhs.form,
        }
    }
}

impl Neg for &GeneralizedSection {
    type Output = GeneralizedSection;
    fn neg(self) -> GeneralizedSection {
        GeneralizedSection {
            vector: -&self.vector,
            form: -&self.form,
        }
    }
}

impl fmt::Display for GeneralizedSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.vector, self.form)
    }
}

/// A closed form `H` of degree `order + 2` twisting the brackets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Twist {
    form: DifferentialForm,
}

impl Twist {
    /// Fails unless `dH = 0`.
    pub fn new(form: DifferentialForm) -> Result<Self, CourantError> {
        if form.degree() < 2 {
            return Err(CourantError::TwistDegree(form.degree()));
        }
        let dh = form.exterior_derivative();
        if !dh.is_zero() {
            return Err(CourantError::NotClosed(dh.to_string()));
        }
        Ok(Twist { form })
    }

    pub fn zero(patch: &Patch, order: usize) -> Self {
        Twist {
            form: DifferentialForm::zero(patch, order + 2),
        }
    }

    pub fn patch(&self) -> &Patch {
        self.form.patch()
    }

    pub fn order(&self) -> usize {
        self.form.degree() - 2
    }

    pub fn form(&self) -> &DifferentialForm {
        &self.form
    }

    pub fn is_zero(&self) -> bool {
        self.form.is_zero()
    }

    fn check_section(&self, s: &GeneralizedSection) -> Result<(), CourantError> {
        if s.patch() != self.patch() {
            return Err(ExteriorError::PatchMismatch.into());
        }
        if s.order() != self.order() {
            return Err(CourantError::OrderMismatch(s.order(), self.order()));
        }
        Ok(())
    }
}

/// `⟨X⊕α, Y⊕β⟩ = ½(i_X β + i_Y α)` on order-1 sections.
pub fn pairing(s: &GeneralizedSection, t: &GeneralizedSection) -> Result<ScalarField, CourantError> {
    s.check_compatible(t)?;
    if s.order() != 1 {
        return Err(CourantError::OrderNotOne(s.order()));
    }
    let sum = contract_one_form(&t.form, &s.vector) + contract_one_form(&s.form, &t.vector);
    Ok(sum.scale(&half()))
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

fn contract_one_form(alpha: &DifferentialForm, x: &VectorField) -> ScalarField {
    alpha
        .terms()
        .filter(|(_, c)| !c.is_zero())
        .fold(ScalarField::zero(), |acc, (idx, c)| {
            let xi = x.component(idx[0]);
            if xi.is_zero() {
                acc
            } else {
                acc + c * xi
            }
        })
}

/// `[X⊕α, Y⊕β]_H = [X,Y] ⊕ (L_X β − i_Y dα − i_Y i_X H)`.
pub fn dorfman(h: &Twist, s: &GeneralizedSection, t: &GeneralizedSection) -> Result<GeneralizedSection, CourantError> {
    s.check_compatible(t)?;
    h.check_section(s)?;
    let (x, alpha) = (&s.vector, &s.form);
    let (y, beta) = (&t.vector, &t.form);
    let mut form = beta.lie_derivative(x);
    if !alpha.is_zero() && !y.is_zero() {
        form = &form - &alpha.exterior_derivative().interior_product(y)?;
    }
    if !h.is_zero() && !x.is_zero() && !y.is_zero() {
        form = &form - &h.form.interior_product(x)?.interior_product(y)?;
    }
    Ok(GeneralizedSection {
        vector: x.lie_bracket(y),
        form,
    })
}

/// The antisymmetrized bracket `dorfman(s,t) − 0 ⊕ ½ d(i_X β + i_Y α)` on
/// order-1 sections.
pub fn courant_bracket(
    h: &Twist,
    s: &GeneralizedSection,
    t: &GeneralizedSection,
) -> Result<GeneralizedSection, CourantError> {
    let p = pairing(s, t)?;
    let mut out = dorfman(h, s, t)?;
    out.form = &out.form - &DifferentialForm::exact(s.patch(), &p);
    Ok(out)
}

/// `dα + i_X H`, which vanishes exactly on admissible pairs.
pub fn admissibility_residual(h: &Twist, s: &GeneralizedSection) -> Result<DifferentialForm, CourantError> {
    h.check_section(s)?;
    let mut r = s.form.exterior_derivative();
    if !h.is_zero() && !s.vector.is_zero() {
        r = &r + &h.form.interior_product(&s.vector)?;
    }
    Ok(r)
}

/// Holds iff `dα + i_X H = 0`; the witness is the residual form.
pub fn is_admissible_pair(h: &Twist, s: &GeneralizedSection) -> Result<Verdict<DifferentialForm>, CourantError> {
    let r = admissibility_residual(h, s)?;
    Ok(if r.is_zero() { Verdict::Holds } else { Verdict::Fails(r) })
}

/// A probe on which the adjoint action of `s` is not diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalWitness {
    pub probe: usize,
    pub bracket: GeneralizedSection,
    pub diagonal: GeneralizedSection,
}

/// Holds iff `[s, t]_H = L_X Y ⊕ L_X β` for every probe `t`.
pub fn adjoint_is_diagonal(
    h: &Twist,
    s: &GeneralizedSection,
    probes: &[GeneralizedSection],
) -> Result<Verdict<DiagonalWitness>, CourantError> {
    for (k, t) in probes.iter().enumerate() {
        let bracket = dorfman(h, s, t)?;
        let diagonal = GeneralizedSection {
            vector: s.vector.lie_bracket(&t.vector),
            form: t.form.lie_derivative(&s.vector),
        };
        if bracket != diagonal {
            return Ok(Verdict::Fails(DiagonalWitness {
                probe: k,
                bracket,
                diagonal,
            }));
        }
    }
    Ok(Verdict::Holds)
}

/// The coordinate probes `∂_i ⊕ 0` and `0 ⊕ x_j dx_I` used when a diagonal
/// check needs a spanning set of test sections.
pub fn standard_probes(patch: &Patch, order: usize) -> Vec<GeneralizedSection> {
    let n = patch.dim();
    let mut out: Vec<GeneralizedSection> = (0..n)
        .map(|i| GeneralizedSection::from_vector(VectorField::coordinate(patch, i), order))
        .collect();
    for i in 0..n {
        let xi = patch.coordinate(i);
        out.push(GeneralizedSection::from_vector(
            VectorField::coordinate(patch, i).scale(&xi),
            order,
        ));
    }
    for idx in crate::exterior::index_tuples(n, order) {
        for j in 0..n {
            let xj = patch.coordinate(j);
            let form = DifferentialForm::from_terms(patch, order, [(idx.clone(), xj)]).expect("valid tuple");
            out.push(GeneralizedSection::from_form(form));
        }
    }
    out
}
