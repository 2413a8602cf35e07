//! Hamiltonian fields, H-admissible functions and their Poisson algebra.
//!
//! Sign convention: a graph section is `(X, i_X h)`, so a Hamiltonian field
//! of `f` satisfies `(X_f, df) ∈ L`, i.e. `i_{X_f} h = df` on graphs, and
//! `{f, g} = X_f(g)`.

use num_traits::Zero;
use thiserror::Error;

use crate::courant::{dorfman, GeneralizedSection};
use crate::dirac::{locus_of, DiracStructure};
use crate::exterior::{index_tuples, DifferentialForm, VectorField};
use crate::linalg::{independent_subset, Matrix};
use crate::report::Report;
use crate::scalar::{Patch, ScalarField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PoissonError {
    #[error("(X, df) is not a section of the Dirac structure")]
    NotHamiltonian,
    #[error("i_X H = {0} does not vanish")]
    NotAdmissible(String),
    #[error("function has no Hamiltonian field")]
    NoHamiltonianField,
    #[error("Hamiltonian fields are not unique: the structure has a {0}-dimensional homogeneous space")]
    Degenerate(usize),
}

/// The affine space of Hamiltonian fields of a function.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSolution {
    pub particular: VectorField,
    /// Basis of `{X : (X, 0) ∈ L}` over the rational-function field.
    pub homogeneous_basis: Vec<VectorField>,
    pub locus: Vec<ScalarField>,
}

/// A function together with a Hamiltonian field annihilating the twist.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleFunction {
    f: ScalarField,
    field: VectorField,
}

impl AdmissibleFunction {
    /// Checks `(X, df) ∈ L` and `i_X H = 0`.
    pub fn new(d: &DiracStructure, f: ScalarField, field: VectorField) -> Result<Self, PoissonError> {
        let df = DifferentialForm::exact(d.patch(), &f);
        let pair = GeneralizedSection::new(field.clone(), df).map_err(|_| PoissonError::NotHamiltonian)?;
        if !d.contains(&pair) {
            return Err(PoissonError::NotHamiltonian);
        }
        let r = twist_contraction(d, &field);
        if !r.is_zero() {
            return Err(PoissonError::NotAdmissible(r.to_string()));
        }
        Ok(AdmissibleFunction { f, field })
    }

    /// Skips validation; used to build negative controls.
    pub fn new_unchecked(f: ScalarField, field: VectorField) -> Self {
        AdmissibleFunction { f, field }
    }

    pub fn function(&self) -> &ScalarField {
        &self.f
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    /// The pair `(X_f, df)`.
    pub fn section(&self) -> GeneralizedSection {
        GeneralizedSection::new(self.field.clone(), DifferentialForm::exact(self.field.patch(), &self.f))
            .expect("same patch")
    }

    /// `{self, g} = X_self(g)`.
    pub fn bracket(&self, g: &AdmissibleFunction) -> ScalarField {
        self.field.apply(&g.f)
    }
}

fn twist_contraction(d: &DiracStructure, x: &VectorField) -> DifferentialForm {
    let h = d.twist().form();
    if h.is_zero() || x.is_zero() {
        return DifferentialForm::zero(d.patch(), h.degree() - 1);
    }
    h.interior_product(x).expect("twist has degree 3")
}

/// Splits the generator matrix into its vector rows and form rows.
fn split_rows(d: &DiracStructure) -> (Matrix<ScalarField>, Matrix<ScalarField>) {
    let n = d.patch().dim();
    let a = d.coefficient_matrix();
    let rows = |range: std::ops::Range<usize>| Matrix::from_rows(range.map(|i| a.row(i).to_vec()).collect(), a.cols());
    (rows(0..n), rows(n..2 * n))
}

fn field_from(patch: &Patch, comps: Vec<ScalarField>) -> VectorField {
    VectorField::new(patch, comps).expect("components of this patch")
}

fn df_coordinates(patch: &Patch, f: &ScalarField) -> Vec<ScalarField> {
    (0..patch.dim()).map(|i| f.derivative(i)).collect()
}

/// All `X` with `(X, df) ∈ L`, or `None` if `f` has no Hamiltonian field.
pub fn hamiltonian_fields(d: &DiracStructure, f: &ScalarField) -> Option<HamiltonianSolution> {
    let patch = d.patch();
    let (a_vec, a_form) = split_rows(d);
    let (c, pivots) = a_form.solve_with_pivots(&df_coordinates(patch, f))?;
    let particular = field_from(patch, a_vec.mul_vec(&c));
    let images: Vec<Vec<ScalarField>> = a_form
        .nullspace()
        .iter()
        .map(|v| a_vec.mul_vec(v))
        .filter(|v| v.iter().any(|c| !c.is_zero()))
        .collect();
    let homogeneous_basis = independent_subset(&images, patch.dim())
        .into_iter()
        .map(|k| field_from(patch, images[k].clone()))
        .collect();
    Some(HamiltonianSolution {
        particular,
        homogeneous_basis,
        locus: locus_of(pivots),
    })
}

/// Finds a Hamiltonian field of `f` with `i_X H = 0` by solving membership
/// and the twist condition as one linear system.
pub fn is_h_admissible(d: &DiracStructure, f: &ScalarField) -> Option<AdmissibleFunction> {
    is_h_admissible_with_locus(d, f).map(|(a, _)| a)
}

pub fn is_h_admissible_with_locus(
    d: &DiracStructure,
    f: &ScalarField,
) -> Option<(AdmissibleFunction, Vec<ScalarField>)> {
    let patch = d.patch();
    let n = patch.dim();
    let h = d.twist().form();
    let (a_vec, a_form) = split_rows(d);
    // X ↦ i_X H, one row per pair a < b
    let pairs = index_tuples(n, 2);
    let mut m_h = Matrix::zeros(pairs.len(), n);
    for (r, ab) in pairs.iter().enumerate() {
        for i in 0..n {
            m_h.set(r, i, h.coefficient(&[i, ab[0], ab[1]]));
        }
    }
    let mut twist_rows = Matrix::zeros(pairs.len(), a_vec.cols());
    for r in 0..pairs.len() {
        for j in 0..a_vec.cols() {
            let v = (0..n)
                .filter(|&i| !m_h.get(r, i).is_zero() && !a_vec.get(i, j).is_zero())
                .fold(ScalarField::zero(), |acc, i| acc + m_h.get(r, i) * a_vec.get(i, j));
            twist_rows.set(r, j, v);
        }
    }
    let system = a_form.stack(&twist_rows);
    let mut rhs = df_coordinates(patch, f);
    rhs.extend(std::iter::repeat_n(ScalarField::zero(), pairs.len()));
    let (c, pivots) = system.solve_with_pivots(&rhs)?;
    let field = field_from(patch, a_vec.mul_vec(&c));
    Some((AdmissibleFunction { f: f.clone(), field }, locus_of(pivots)))
}

/// `{f, g} = L_{X_f} g`.
pub fn poisson_bracket(f: &AdmissibleFunction, g: &AdmissibleFunction) -> ScalarField {
    f.bracket(g)
}

/// Poisson algebra checks on a list of admissible functions: validity of each
/// witness field, closure under product and bracket, antisymmetry, the
/// Leibniz rule and the Jacobi identity.
pub fn verify_poisson_algebra(d: &DiracStructure, fs: &[AdmissibleFunction]) -> Report {
    let patch = d.patch();
    let show = |f: &ScalarField| patch.show(f).to_string();
    let mut report = Report::new("poisson algebra");
    for (i, a) in fs.iter().enumerate() {
        let name = format!("admissible[{i}]");
        if !d.contains(&a.section()) {
            report.fail(
                name,
                format!("({}, d({})) is not in the structure", a.field, show(&a.f)),
            );
            continue;
        }
        let r = twist_contraction(d, &a.field);
        if r.is_zero() {
            report.pass(name);
        } else {
            report.fail(name, format!("i_X H = {r} for f = {}", show(&a.f)));
        }
    }
    let n = fs.len();
    let mut products = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i..n {
            let p = &fs[i].f * &fs[j].f;
            let name = format!("closure/product[{i},{j}]");
            match is_h_admissible_with_locus(d, &p) {
                Some((a, locus)) => {
                    report.pass(name);
                    for l in locus {
                        report.add_locus(show(&l));
                    }
                    products[i][j] = Some(a.clone());
                    products[j][i] = Some(a);
                }
                None => {
                    report.fail(name, format!("{} is not H-admissible", show(&p)));
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let b = fs[i].bracket(&fs[j]);
            let name = format!("closure/bracket[{i},{j}]");
            if is_h_admissible(d, &b).is_some() {
                report.pass(name);
            } else {
                report.fail(name, format!("{{f{i}, f{j}}} = {} is not H-admissible", show(&b)));
            }
            let sum = &b + &fs[j].bracket(&fs[i]);
            let name = format!("antisymmetry[{i},{j}]");
            if sum.is_zero() {
                report.pass(name);
            } else {
                report.fail(name, format!("{{f{i}, f{j}}} + {{f{j}, f{i}}} = {}", show(&sum)));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let Some(prod) = &products[j][k] else { continue };
                // {f, gh} computed from the Hamiltonian field of gh
                let lhs = -prod.field.apply(&fs[i].f);
                let rhs = &fs[i].bracket(&fs[j]) * &fs[k].f + &fs[j].f * &fs[i].bracket(&fs[k]);
                let name = format!("leibniz[{i};{j},{k}]");
                let diff = &lhs - &rhs;
                if diff.is_zero() {
                    report.pass(name);
                } else {
                    report.fail(name, format!("{{f, gh}} - {{f,g}}h - g{{f,h}} = {}", show(&diff)));
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let s = jacobi_sum(&fs[i].field, &fs[j].field, &fs[k].field, &fs[i].f, &fs[j].f, &fs[k].f);
                let name = format!("jacobi[{i},{j},{k}]");
                if s.is_zero() {
                    report.pass(name);
                } else {
                    report.fail(name, format!("cyclic sum = {}", show(&s)));
                }
            }
        }
    }
    report
}

fn jacobi_sum(
    xf: &VectorField,
    xg: &VectorField,
    xh: &VectorField,
    f: &ScalarField,
    g: &ScalarField,
    h: &ScalarField,
) -> ScalarField {
    let a = xf.apply(&xg.apply(h));
    let b = xg.apply(&xh.apply(f));
    let c = xh.apply(&xf.apply(g));
    &(&a + &b) + &c
}

/// Checks that the Dorfman bracket of `(X_f, df)` and `(X_g, dg)` is
/// `([X_f, X_g], d{f,g})`, that `[X_f, X_g]` annihilates the twist, and that
/// it is a Hamiltonian field of `{f, g}`.
pub fn admissible_bracket_identity(d: &DiracStructure, f: &AdmissibleFunction, g: &AdmissibleFunction) -> Report {
    let patch = d.patch();
    let mut report = Report::new("admissible bracket identity");
    let fg = f.bracket(g);
    let commutator = f.field.lie_bracket(&g.field);
    let expected =
        GeneralizedSection::new(commutator.clone(), DifferentialForm::exact(patch, &fg)).expect("same patch");
    let actual = dorfman(d.twist(), &f.section(), &g.section()).expect("order-1 sections");
    if actual == expected {
        report.pass("dorfman");
    } else {
        let residual = &actual - &expected;
        report.fail("dorfman", format!("residual {residual}"));
    }
    let r = twist_contraction(d, &commutator);
    if r.is_zero() {
        report.pass("twist-annihilation");
    } else {
        report.fail("twist-annihilation", format!("i_[X_f,X_g] H = {r}"));
    }
    if d.contains(&expected) {
        report.pass("hamiltonian");
    } else {
        report.fail("hamiltonian", format!("{expected} is not in the structure"));
    }
    report
}

/// The cyclic Jacobi sum of `f, g, h` and `H(X_f, X_g, X_h)` on a structure
/// whose Hamiltonian fields are unique.
pub fn jacobiator(
    d: &DiracStructure,
    f: &ScalarField,
    g: &ScalarField,
    h: &ScalarField,
) -> Result<(ScalarField, ScalarField), PoissonError> {
    let field = |x: &ScalarField| -> Result<VectorField, PoissonError> {
        let sol = hamiltonian_fields(d, x).ok_or(PoissonError::NoHamiltonianField)?;
        if !sol.homogeneous_basis.is_empty() {
            return Err(PoissonError::Degenerate(sol.homogeneous_basis.len()));
        }
        Ok(sol.particular)
    };
    let (xf, xg, xh) = (field(f)?, field(g)?, field(h)?);
    let sum = jacobi_sum(&xf, &xg, &xh, f, g, h);
    let twist = d.twist().form();
    let value = if twist.is_zero() {
        ScalarField::zero()
    } else {
        twist.evaluate(&[&xf, &xg, &xh]).expect("twist has degree 3")
    };
    Ok((sum, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::courant::Twist;
    use crate::parse::{parse_form, parse_scalar, parse_vector_field};

    fn plane() -> (Patch, DiracStructure) {
        let p = Patch::new(["x", "y"]).unwrap();
        let h = parse_form(&p, "dx^dy", None).unwrap();
        let d = DiracStructure::graph_of_two_form(&h, Twist::zero(&p, 1)).unwrap();
        (p, d)
    }

    fn r4() -> (Patch, DiracStructure) {
        let p = Patch::new(["x1", "y1", "x2", "y2"]).unwrap();
        let h = parse_form(&p, "(1+x1^2)*(dx1^dy1 + dx2^dy2)", None).unwrap();
        let d = DiracStructure::graph_of_two_form(&h, Twist::new(h.exterior_derivative()).unwrap()).unwrap();
        (p, d)
    }

    fn s(p: &Patch, t: &str) -> ScalarField {
        parse_scalar(p, t).unwrap()
    }

    fn v(p: &Patch, t: &str) -> VectorField {
        parse_vector_field(p, t).unwrap()
    }

    #[test]
    fn hamiltonian_field_examples() {
        let (p, d) = plane();
        let sol = hamiltonian_fields(&d, &s(&p, "x")).unwrap();
        assert_eq!(sol.particular, v(&p, "-@y"));
        assert!(sol.homogeneous_basis.is_empty());
        let t = DiracStructure::cotangent(&p, Twist::zero(&p, 1)).unwrap();
        let sol = hamiltonian_fields(&t, &s(&p, "x")).unwrap();
        assert!(sol.particular.is_zero());
        let (q, d4) = r4();
        let sol = hamiltonian_fields(&d4, &s(&q, "x2")).unwrap();
        assert_eq!(sol.particular, v(&q, "-1/(1+x1^2)*@y2"));
        assert_eq!(sol.locus, vec![s(&q, "1+x1^2")]);
    }

    #[test]
    fn admissibility_examples() {
        let (p, d) = r4();
        let a = is_h_admissible(&d, &s(&p, "x1")).unwrap();
        assert_eq!(a.field(), &v(&p, "-1/(1+x1^2)*@y1"));
        assert!(is_h_admissible(&d, &s(&p, "x2")).is_none());
        assert!(is_h_admissible(&d, &s(&p, "y1")).is_none());
        assert!(is_h_admissible(&d, &s(&p, "1+x1^2")).is_some());
        let x2 = hamiltonian_fields(&d, &s(&p, "x2")).unwrap().particular;
        assert!(matches!(
            AdmissibleFunction::new(&d, s(&p, "x2"), x2),
            Err(PoissonError::NotAdmissible(_))
        ));
        let (q, plane) = plane();
        for f in ["x", "x*y^3 - 2", "x^4 + y"] {
            assert!(is_h_admissible(&plane, &s(&q, f)).is_some());
        }
    }

    #[test]
    fn bracket_examples() {
        let (p, d) = plane();
        let x = is_h_admissible(&d, &s(&p, "x")).unwrap();
        let y = is_h_admissible(&d, &s(&p, "y")).unwrap();
        assert_eq!(poisson_bracket(&x, &y), s(&p, "-1"));
        assert!(poisson_bracket(&x, &x).is_zero());
        let (q, d4) = r4();
        let a = is_h_admissible(&d4, &s(&q, "x1")).unwrap();
        let b = is_h_admissible(&d4, &s(&q, "1+x1^2")).unwrap();
        assert!(poisson_bracket(&a, &b).is_zero());
    }

    #[test]
    fn poisson_algebra_examples() {
        let (p, d) = r4();
        let fs: Vec<_> = ["x1", "1+x1^2", "x1^3"]
            .iter()
            .map(|t| is_h_admissible(&d, &s(&p, t)).unwrap())
            .collect();
        let r = verify_poisson_algebra(&d, &fs);
        assert!(r.passed(), "{r}");
        let (q, plane) = plane();
        let mut fs: Vec<_> = ["x", "y", "x*y"]
            .iter()
            .map(|t| is_h_admissible(&plane, &s(&q, t)).unwrap())
            .collect();
        assert!(verify_poisson_algebra(&plane, &fs).passed());
        fs[2] = AdmissibleFunction::new_unchecked(s(&q, "x*y"), v(&q, "@x"));
        let r = verify_poisson_algebra(&plane, &fs);
        assert!(!r.item("admissible[2]").unwrap().passed);
    }

    #[test]
    fn bracket_identity_examples() {
        let (p, d) = plane();
        let x = is_h_admissible(&d, &s(&p, "x")).unwrap();
        let y = is_h_admissible(&d, &s(&p, "y")).unwrap();
        assert!(admissible_bracket_identity(&d, &x, &y).passed());
        let (q, d4) = r4();
        let a = is_h_admissible(&d4, &s(&q, "x1")).unwrap();
        let b = is_h_admissible(&d4, &s(&q, "1+x1^2")).unwrap();
        assert!(admissible_bracket_identity(&d4, &a, &b).passed());
        let field = |t: &str| hamiltonian_fields(&d4, &s(&q, t)).unwrap().particular;
        let f = AdmissibleFunction::new_unchecked(s(&q, "x2"), field("x2"));
        let g = AdmissibleFunction::new_unchecked(s(&q, "y2"), field("y2"));
        let r = admissible_bracket_identity(&d4, &f, &g);
        assert!(!r.item("dorfman").unwrap().passed);
    }

    #[test]
    fn jacobiator_examples() {
        let (p, d) = r4();
        // values frozen from an independent symbolic computation
        let (j, h) = jacobiator(&d, &s(&p, "x2"), &s(&p, "y2"), &s(&p, "x1*y1")).unwrap();
        assert_eq!(j, s(&p, "2*x1^2/(x1^2+1)^3"));
        assert_eq!(j, h);
        let (j, h) = jacobiator(&d, &s(&p, "x2"), &s(&p, "y1"), &s(&p, "y2")).unwrap();
        assert_eq!(j, s(&p, "-2*x1/(x1^2+1)^3"));
        assert_eq!(j, h);
        let (j, h) = jacobiator(&d, &s(&p, "x1"), &s(&p, "x2"), &s(&p, "x2*y2")).unwrap();
        assert!(j.is_zero() && h.is_zero());
        let (j, h) = jacobiator(&d, &s(&p, "x1"), &s(&p, "x1^2"), &s(&p, "1+x1^3")).unwrap();
        assert!(j.is_zero() && h.is_zero());
        let (q, plane) = plane();
        let (j, _) = jacobiator(&plane, &s(&q, "x^2*y"), &s(&q, "y^3"), &s(&q, "x+y")).unwrap();
        assert!(j.is_zero());
    }

    #[test]
    fn degenerate_structures_are_rejected_by_jacobiator() {
        let p = Patch::new(["x", "y", "z"]).unwrap();
        let h = parse_form(&p, "dx^dy", None).unwrap();
        let d = DiracStructure::graph_of_two_form(&h, Twist::zero(&p, 1)).unwrap();
        let f = s(&p, "x");
        assert_eq!(jacobiator(&d, &f, &f, &f), Err(PoissonError::Degenerate(1)));
    }
}
