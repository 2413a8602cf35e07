//! Exterior calculus on a patch: vector fields, differential forms, wedge,
//! exterior derivative, interior product and Lie derivatives.
//!
//! Forms are stored sparsely on strictly increasing index tuples; every sign
//! comes from the parity of the sorting permutation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::write_term;
use crate::scalar::{Patch, ScalarField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExteriorError {
    #[error("operands live on different patches")]
    PatchMismatch,
    #[error("expected {expected} components, found {found}")]
    ComponentCount { expected: usize, found: usize },
    #[error("coefficient involves a variable outside the patch")]
    ForeignVariable,
    #[error("index {0} is outside the patch")]
    IndexOutOfRange(usize),
    #[error("index tuple of length {found} in a form of degree {expected}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("interior product of a 0-form")]
    ZeroFormContraction,
    #[error("{0} vector fields supplied to a form of degree {1}")]
    ArgumentCount(usize, usize),
}

/// Sorts `indices`, returning the sorted tuple and whether the permutation
/// was odd; `None` if an index repeats.
pub(crate) fn sort_with_sign(mut indices: Vec<usize>) -> Option<(Vec<usize>, bool)> {
    let mut odd = false;
    // insertion sort: the tuples are short and we need the swap count
    for i in 1..indices.len() {
        let mut j = i;
        while j > 0 && indices[j - 1] > indices[j] {
            indices.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((indices, odd))
    }
}

/// All strictly increasing index tuples of length `k` below `n`, in
/// lexicographic order.
pub fn index_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorField {
    patch: Patch,
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(patch: &Patch, components: Vec<ScalarField>) -> Result<Self, ExteriorError> {
        if components.len() != patch.dim() {
            return Err(ExteriorError::ComponentCount {
                expected: patch.dim(),
                found: components.len(),
            });
        }
        if !components.iter().all(|c| patch.contains(c)) {
            return Err(ExteriorError::ForeignVariable);
        }
        Ok(VectorField {
            patch: patch.clone(),
            components,
        })
    }

    pub fn zero(patch: &Patch) -> Self {
        VectorField {
            patch: patch.clone(),
            components: vec![ScalarField::zero(); patch.dim()],
        }
    }

    /// The coordinate field `∂/∂x_index`.
    pub fn coordinate(patch: &Patch, index: usize) -> Self {
        let mut v = Self::zero(patch);
        v.components[index] = ScalarField::one();
        v
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Zero::is_zero)
    }

    /// The derivation `X(f) = Σ Xⁱ ∂ᵢf`.
    pub fn apply(&self, f: &ScalarField) -> ScalarField {
        let mut acc = ScalarField::zero();
        for (i, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = f.derivative(i);
            if !d.is_zero() {
                acc = &acc + &(c * &d);
            }
        }
        acc
    }

    /// `[X, Y]ⁱ = X(Yⁱ) − Y(Xⁱ)`.
    pub fn lie_bracket(&self, other: &VectorField) -> VectorField {
        assert_eq!(self.patch, other.patch, "lie bracket across patches");
        let components = (0..self.patch.dim())
            .map(|i| &self.apply(&other.components[i]) - &other.apply(&self.components[i]))
            .collect();
        VectorField {
            patch: self.patch.clone(),
            components,
        }
    }

    pub fn scale(&self, f: &ScalarField) -> VectorField {
        VectorField {
            patch: self.patch.clone(),
            components: self.components.iter().map(|c| c * f).collect(),
        }
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: Self) -> VectorField {
        assert_eq!(self.patch, rhs.patch, "vector field sum across patches");
        let components = self
            .components
            .iter()
            .zip(&rhs.components)
            .map(|(a, b)| a + b)
            .collect();
        VectorField {
            patch: self.patch.clone(),
            components,
        }
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: Self) -> VectorField {
        self + &(-rhs)
    }
}

impl Neg for &VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        VectorField {
            patch: self.patch.clone(),
            components: self.components.iter().map(|c| -c).collect(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DifferentialForm {
    patch: Patch,
    degree: usize,
    terms: BTreeMap<Vec<usize>, ScalarField>,
}

impl DifferentialForm {
    pub fn zero(patch: &Patch, degree: usize) -> Self {
        DifferentialForm {
            patch: patch.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(patch: &Patch, f: ScalarField) -> Self {
        let mut form = Self::zero(patch, 0);
        if !f.is_zero() {
            form.terms.insert(Vec::new(), f);
        }
        form
    }

    /// The coordinate 1-form `dx_index`.
    pub fn differential(patch: &Patch, index: usize) -> Self {
        assert!(index < patch.dim(), "coordinate index out of range");
        let mut form = Self::zero(patch, 1);
        form.terms.insert(vec![index], ScalarField::one());
        form
    }

    /// `df` for a function `f`.
    pub fn exact(patch: &Patch, f: &ScalarField) -> Self {
        Self::scalar(patch, f.clone()).exterior_derivative()
    }

    /// Builds a form from `(indices, coefficient)` pairs in any index order.
    pub fn from_terms<I>(patch: &Patch, degree: usize, terms: I) -> Result<Self, ExteriorError>
    where
        I: IntoIterator<Item = (Vec<usize>, ScalarField)>,
    {
        let mut form = Self::zero(patch, degree);
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(ExteriorError::DegreeMismatch {
                    expected: degree,
                    found: idx.len(),
                });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= patch.dim()) {
                return Err(ExteriorError::IndexOutOfRange(bad));
            }
            if !patch.contains(&c) {
                return Err(ExteriorError::ForeignVariable);
            }
            if let Some((sorted, odd)) = sort_with_sign(idx) {
                form.accumulate(sorted, if odd { -c } else { c });
            }
        }
        Ok(form)
    }

    fn accumulate(&mut self, idx: Vec<usize>, c: ScalarField) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Nonzero coefficients keyed by strictly increasing index tuples.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &ScalarField)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient on `dx_{i1}∧…∧dx_{ik}` for indices in any order.
    pub fn coefficient(&self, indices: &[usize]) -> ScalarField {
        match sort_with_sign(indices.to_vec()) {
            None => ScalarField::zero(),
            Some((sorted, odd)) => {
                let c = self.terms.get(&sorted).cloned().unwrap_or_else(ScalarField::zero);
                if odd {
                    -c
                } else {
                    c
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The function of a 0-form.
    pub fn as_scalar(&self) -> Option<ScalarField> {
        (self.degree == 0).then(|| self.coefficient(&[]))
    }

    pub fn scale(&self, f: &ScalarField) -> Self {
        let mut out = Self::zero(&self.patch, self.degree);
        if f.is_zero() {
            return out;
        }
        for (k, c) in &self.terms {
            out.accumulate(k.clone(), c * f);
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.patch, other.patch, "wedge across patches");
        let mut out = Self::zero(&self.patch, self.degree + other.degree);
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                let mut idx = i.clone();
                idx.extend_from_slice(j);
                if let Some((sorted, odd)) = sort_with_sign(idx) {
                    let c = a * b;
                    out.accumulate(sorted, if odd { -c } else { c });
                }
            }
        }
        out
    }

    pub fn exterior_derivative(&self) -> Self {
        let mut out = Self::zero(&self.patch, self.degree + 1);
        for (idx, c) in &self.terms {
            for j in 0..self.patch.dim() {
                if idx.contains(&j) {
                    continue;
                }
                let dc = c.derivative(j);
                if dc.is_zero() {
                    continue;
                }
                let mut full = Vec::with_capacity(idx.len() + 1);
                full.push(j);
                full.extend_from_slice(idx);
                let (sorted, odd) = sort_with_sign(full).expect("indices are distinct");
                out.accumulate(sorted, if odd { -dc } else { dc });
            }
        }
        out
    }

    /// `i_X α`, the contraction of `X` into the first slot.
    pub fn interior_product(&self, x: &VectorField) -> Result<Self, ExteriorError> {
        if self.degree == 0 {
            return Err(ExteriorError::ZeroFormContraction);
        }
        if self.patch != x.patch {
            return Err(ExteriorError::PatchMismatch);
        }
        let mut out = Self::zero(&self.patch, self.degree - 1);
        for (idx, c) in &self.terms {
            for (p, &i) in idx.iter().enumerate() {
                let xi = &x.components[i];
                if xi.is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(p);
                let t = xi * c;
                out.accumulate(rest, if p % 2 == 1 { -t } else { t });
            }
        }
        Ok(out)
    }

    /// `L_X α = i_X dα + d i_X α`; on functions, `X(f)`.
    pub fn lie_derivative(&self, x: &VectorField) -> Self {
        assert_eq!(self.patch, x.patch, "lie derivative across patches");
        if self.degree == 0 {
            return Self::scalar(&self.patch, x.apply(&self.coefficient(&[])));
        }
        let a = self.exterior_derivative().interior_product(x).expect("degree ≥ 1");
        let b = self.interior_product(x).expect("degree ≥ 1").exterior_derivative();
        &a + &b
    }

    /// `L_X α` by transporting coefficients and differentials separately:
    /// `Σ_I X(α_I) dx^I + α_I Σ_p dx^{i_1} ∧ … ∧ dX^{i_p} ∧ … ∧ dx^{i_k}`.
    pub fn lie_derivative_coefficientwise(&self, x: &VectorField) -> Self {
        assert_eq!(self.patch, x.patch, "lie derivative across patches");
        let n = self.patch.dim();
        let mut terms = Vec::new();
        for (idx, a) in &self.terms {
            terms.push((idx.clone(), x.apply(a)));
            for p in 0..idx.len() {
                let comp = &x.components[idx[p]];
                for j in 0..n {
                    let dxj = comp.derivative(j);
                    if dxj.is_zero() {
                        continue;
                    }
                    let mut moved = idx.clone();
                    moved[p] = j;
                    terms.push((moved, a * &dxj));
                }
            }
        }
        Self::from_terms(&self.patch, self.degree, terms).expect("indices of this patch")
    }

    /// `α(X_1, …, X_k) = i_{X_k} ⋯ i_{X_1} α`.
    pub fn evaluate(&self, fields: &[&VectorField]) -> Result<ScalarField, ExteriorError> {
        if fields.len() != self.degree {
            return Err(ExteriorError::ArgumentCount(fields.len(), self.degree));
        }
        let mut acc = self.clone();
        for x in fields {
            acc = acc.interior_product(x)?;
        }
        Ok(acc.coefficient(&[]))
    }
}

impl Add for &DifferentialForm {
    type Output = DifferentialForm;
    fn add(self, rhs: Self) -> DifferentialForm {
        assert_eq!(self.patch, rhs.patch, "form sum across patches");
        assert_eq!(self.degree, rhs.degree, "sum of forms of different degree");
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.accumulate(k.clone(), c.clone());
        }
        out
    }
}

impl Sub for &DifferentialForm {
    type Output = DifferentialForm;
    fn sub(self, rhs: Self) -> DifferentialForm {
        self + &(-rhs)
    }
}

impl Neg for &DifferentialForm {
    type Output = DifferentialForm;
    fn neg(self) -> DifferentialForm {
        DifferentialForm {
            patch: self.patch.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }
}

/// Objects with a Lie derivative along vector fields, a linear structure
/// over the scalars and exact equality.
pub trait LieTransport: Clone + PartialEq {
    fn lie_derivative_along(&self, x: &VectorField) -> Self;
    fn scaled(&self, c: &ScalarField) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn render(&self, patch: &Patch) -> String;
}

impl LieTransport for ScalarField {
    fn lie_derivative_along(&self, x: &VectorField) -> Self {
        x.apply(self)
    }
    fn scaled(&self, c: &ScalarField) -> Self {
        self * c
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn render(&self, patch: &Patch) -> String {
        patch.show(self).to_string()
    }
}

impl LieTransport for DifferentialForm {
    fn lie_derivative_along(&self, x: &VectorField) -> Self {
        self.lie_derivative(x)
    }
    fn scaled(&self, c: &ScalarField) -> Self {
        self.scale(c)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn render(&self, _patch: &Patch) -> String {
        self.to_string()
    }
}

impl LieTransport for VectorField {
    fn lie_derivative_along(&self, x: &VectorField) -> Self {
        x.lie_bracket(self)
    }
    fn scaled(&self, c: &ScalarField) -> Self {
        self.scale(c)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn render(&self, _patch: &Patch) -> String {
        self.to_string()
    }
}

/// Writes `c*basis` for one term of a sum; returns whether the sign was
/// pulled out as negative. Multi-term coefficients are parenthesized.
fn write_coefficient_term(patch: &Patch, c: &ScalarField, basis: &str, out: &mut String) -> bool {
    let single = c.is_polynomial() && c.numerator().num_terms() == 1;
    if single {
        let (m, k) = c.numerator().leading_term().expect("nonzero");
        let neg = k.is_negative();
        let mut body = String::new();
        write_term(&k.abs(), m, patch.names(), &mut body);
        if body == "1" {
            out.push_str(basis);
        } else {
            out.push_str(&body);
            out.push('*');
            out.push_str(basis);
        }
        neg
    } else {
        out.push('(');
        c.write_with(patch.names(), out);
        out.push_str(")*");
        out.push_str(basis);
        false
    }
}

fn write_sum<'a, I>(patch: &Patch, terms: I, f: &mut fmt::Formatter<'_>) -> fmt::Result
where
    I: Iterator<Item = (String, &'a ScalarField)>,
{
    let mut s = String::new();
    for (k, (basis, c)) in terms.enumerate() {
        let mut body = String::new();
        let neg = write_coefficient_term(patch, c, &basis, &mut body);
        match (k, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        s.push_str(&body);
    }
    if s.is_empty() {
        s.push('0');
    }
    f.write_str(&s)
}

impl fmt::Display for DifferentialForm {
    /// Prints in the form-literal grammar, e.g. `2*x1*dx1^dx2^dy2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 0 {
            return write!(f, "{}", self.patch.show(&self.coefficient(&[])));
        }
        let names = self.patch.names();
        let terms = self.terms.iter().map(|(idx, c)| {
            let basis = idx
                .iter()
                .map(|&i| format!("d{}", names[i]))
                .collect::<Vec<_>>()
                .join("^");
            (basis, c)
        });
        write_sum(&self.patch, terms, f)
    }
}

impl fmt::Display for VectorField {
    /// Prints in the vector-field grammar, e.g. `x*@y - y*@x`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.patch.names();
        let terms = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (format!("@{}", names[i]), c));
        write_sum(&self.patch, terms, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_form, parse_scalar, parse_vector_field};

    fn p2() -> Patch {
        Patch::new(["x", "y"]).unwrap()
    }
    fn p4() -> Patch {
        Patch::new(["x1", "y1", "x2", "y2"]).unwrap()
    }
    fn form(p: &Patch, s: &str) -> DifferentialForm {
        parse_form(p, s, None).unwrap()
    }
    fn vf(p: &Patch, s: &str) -> VectorField {
        parse_vector_field(p, s).unwrap()
    }

    #[test]
    fn sign_of_sorting_permutation() {
        assert_eq!(sort_with_sign(vec![0, 1, 2]), Some((vec![0, 1, 2], false)));
        assert_eq!(sort_with_sign(vec![1, 0, 2]), Some((vec![0, 1, 2], true)));
        assert_eq!(sort_with_sign(vec![2, 0, 1]), Some((vec![0, 1, 2], false)));
        assert_eq!(sort_with_sign(vec![1, 1]), None);
    }

    #[test]
    fn wedge_examples() {
        let p = p2();
        let dxdy = form(&p, "dx").wedge(&form(&p, "dy"));
        assert_eq!(dxdy.coefficient(&[0, 1]), ScalarField::one());
        assert_eq!(dxdy.num_terms(), 1);
        assert!(form(&p, "dx").wedge(&form(&p, "dx")).is_zero());
        // d(1+x1^2) ∧ ω on R^4
        let q = p4();
        let dphi = DifferentialForm::exact(&q, &parse_scalar(&q, "1 + x1^2").unwrap());
        let omega = form(&q, "dx1^dy1 + dx2^dy2");
        assert_eq!(dphi.wedge(&omega), form(&q, "2*x1*dx1^dx2^dy2"));
    }

    #[test]
    fn wedge_beyond_dimension_is_zero() {
        let p = p2();
        let w = form(&p, "dx^dy").wedge(&form(&p, "x*dx + dy"));
        assert_eq!(w.degree(), 3);
        assert!(w.is_zero());
    }

    #[test]
    fn exterior_derivative_examples() {
        let p = p2();
        assert_eq!(form(&p, "x*dy").exterior_derivative(), form(&p, "dx^dy"));
        assert!(form(&p, "dx^dy").exterior_derivative().is_zero());
        let q = p4();
        let h = form(&q, "(1+x1^2)*dx1^dy1 + (1+x1^2)*dx2^dy2");
        assert_eq!(h.exterior_derivative(), form(&q, "2*x1*dx1^dx2^dy2"));
    }

    #[test]
    fn interior_product_examples() {
        let p = p2();
        let dxdy = form(&p, "dx^dy");
        assert_eq!(dxdy.interior_product(&vf(&p, "@x")).unwrap(), form(&p, "dy"));
        assert_eq!(dxdy.interior_product(&vf(&p, "@y")).unwrap(), form(&p, "-dx"));
        let q = p4();
        let h3 = form(&q, "2*x1*dx1^dx2^dy2");
        assert_eq!(h3.interior_product(&vf(&q, "@y2")).unwrap(), form(&q, "2*x1*dx1^dx2"));
        let f = DifferentialForm::scalar(&p, parse_scalar(&p, "x").unwrap());
        assert_eq!(
            f.interior_product(&vf(&p, "@x")),
            Err(ExteriorError::ZeroFormContraction)
        );
    }

    #[test]
    fn lie_derivative_examples() {
        let p = p2();
        assert_eq!(form(&p, "x*dy").lie_derivative(&vf(&p, "@x")), form(&p, "dy"));
        let q = p4();
        let h = form(&q, "(1+x1^2)*dx1^dy1 + (1+x1^2)*dx2^dy2");
        assert!(h.lie_derivative(&vf(&q, "@y1")).is_zero());
        assert_eq!(
            h.lie_derivative(&vf(&q, "@x1")),
            form(&q, "2*x1*dx1^dy1 + 2*x1*dx2^dy2")
        );
    }

    #[test]
    fn lie_bracket_examples() {
        let p = p2();
        assert!(vf(&p, "@x").lie_bracket(&vf(&p, "@y")).is_zero());
        assert_eq!(vf(&p, "x*@y").lie_bracket(&vf(&p, "@x")), vf(&p, "-@y"));
        let x = vf(&p, "x^2*@x + x*y*@y");
        assert!(x.lie_bracket(&x).is_zero());
    }

    #[test]
    fn evaluation_on_fields() {
        let p = p2();
        let v = form(&p, "dx^dy").evaluate(&[&vf(&p, "@x"), &vf(&p, "@y")]).unwrap();
        assert_eq!(v, ScalarField::one());
        assert!(form(&p, "dx").evaluate(&[]).is_err());
    }

    #[test]
    fn display_round_trips() {
        let q = p4();
        for s in [
            "2*x1*dx1^dx2^dy2",
            "-dx1 + (x1^2 + 1)*dy1",
            "0",
            "(1)/(x1)*dx1^dy2 - 1/2*y2*dx2^dy1",
        ] {
            let f = form(&q, s);
            assert_eq!(form(&q, &f.to_string()), f, "{s}");
        }
        let v = vf(&q, "x1*@y1 - (x2+1)*@x2");
        assert_eq!(vf(&q, &v.to_string()), v);
    }

    #[test]
    fn construction_checks() {
        let p = p2();
        assert!(matches!(
            VectorField::new(&p, vec![ScalarField::one()]),
            Err(ExteriorError::ComponentCount { .. })
        ));
        assert_eq!(
            VectorField::new(&p, vec![ScalarField::var(2), ScalarField::zero()]),
            Err(ExteriorError::ForeignVariable)
        );
        assert_eq!(
            DifferentialForm::from_terms(&p, 1, [(vec![3], ScalarField::one())]),
            Err(ExteriorError::IndexOutOfRange(3))
        );
        let f = DifferentialForm::from_terms(&p, 2, [(vec![1, 0], ScalarField::one())]).unwrap();
        assert_eq!(f, form(&p, "-dx^dy"));
    }
}
