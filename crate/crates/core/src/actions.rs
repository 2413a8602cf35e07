//! Infinitesimal actions, extended actions of Courant algebras on `TM ⊕ T*M`,
//! Dirac actions, moment maps and the induced map into admissible functions.
//!
//! Elements of the Courant algebra `a` are coordinate vectors in its basis;
//! `ρ` is stored on basis elements and extended linearly over the rationals.

use num_traits::Zero;
use thiserror::Error;

use crate::courant::{
    adjoint_is_diagonal, dorfman, is_admissible_pair, standard_probes, CourantError, GeneralizedSection, Twist,
};
use crate::dirac::{DiracError, DiracStructure};
use crate::exterior::{DifferentialForm, ExteriorError, VectorField};
use crate::leibniz::{
    check_equivariant, hemisemidirect, induced_module_action, CourantAlgebraSpec, FiniteLieAlgebra, GModule,
    LeibnizError,
};
use crate::linalg::Matrix;
use crate::poisson::{is_h_admissible_with_locus, AdmissibleFunction};
use crate::poly::{Monomial, Polynomial};
use crate::report::{Report, Verdict};
use crate::scalar::{Patch, ScalarField};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ActionError {
    #[error(transparent)]
    Leibniz(#[from] LeibnizError),
    #[error(transparent)]
    Courant(#[from] CourantError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Dirac(#[from] DiracError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("all fields and sections must live on the same patch")]
    PatchMismatch,
    #[error("sections must have order 1, found order {0}")]
    OrderNotOne(usize),
    #[error("psi is not a homomorphism at ({i}, {j}): psi([e_i,e_j]) - [psi(e_i), psi(e_j)] = {residual}")]
    NotHomomorphism { i: usize, j: usize, residual: String },
    #[error("form is not closed: d = {0}")]
    NotClosed(String),
    #[error("2-form is degenerate (rank {rank} < {dim})")]
    Degenerate { rank: usize, dim: usize },
    #[error("psi({xi}) is not symplectic: d(i_X omega) = {residual}")]
    NotSymplecticField { xi: String, residual: String },
    #[error("h is not invariant under psi({xi}): L_X h = {residual}")]
    NotInvariant { xi: String, residual: String },
    #[error("map is not equivariant at ({xi}, {eta}): {lhs} != {rhs}")]
    NotEquivariant {
        xi: String,
        eta: String,
        lhs: String,
        rhs: String,
    },
    #[error("the action and the Dirac structure use different twists")]
    TwistMismatch,
    #[error("no polynomial antiderivative: {0}")]
    NoAntiderivative(String),
    #[error("expected dim ker pi = dim g = {g}, found {kernel}")]
    NotDoubled { g: usize, kernel: usize },
}

fn constant(c: &Rational) -> ScalarField {
    ScalarField::constant(c.clone())
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::from_integer(1.into());
    v
}

fn combine_fields(patch: &Patch, fields: &[VectorField], coeffs: &[Rational]) -> VectorField {
    coeffs
        .iter()
        .zip(fields)
        .filter(|(c, _)| !c.is_zero())
        .fold(VectorField::zero(patch), |acc, (c, x)| &acc + &x.scale(&constant(c)))
}

fn combine_scalars(values: &[ScalarField], coeffs: &[Rational]) -> ScalarField {
    coeffs
        .iter()
        .zip(values)
        .filter(|(c, _)| !c.is_zero())
        .fold(ScalarField::zero(), |acc, (c, f)| &acc + &(f * &constant(c)))
}

/// A Lie algebra homomorphism `ψ: g → X(M)` given on basis elements.
#[derive(Clone, Debug, PartialEq)]
pub struct InfinitesimalAction {
    g: FiniteLieAlgebra<Rational>,
    fields: Vec<VectorField>,
}

impl InfinitesimalAction {
    /// Checks `ψ([e_i, e_j]) = [ψ(e_i), ψ(e_j)]` on all basis pairs.
    pub fn new(g: FiniteLieAlgebra<Rational>, fields: Vec<VectorField>) -> Result<Self, ActionError> {
        if fields.len() != g.dim() {
            return Err(ActionError::Dimension(format!(
                "{} fields for a {}-dimensional algebra",
                fields.len(),
                g.dim()
            )));
        }
        let Some(first) = fields.first() else {
            return Err(ActionError::Dimension("the algebra has no basis".into()));
        };
        let patch = first.patch().clone();
        if fields.iter().any(|x| x.patch() != &patch) {
            return Err(ActionError::PatchMismatch);
        }
        let action = InfinitesimalAction { g, fields };
        for i in 0..action.g.dim() {
            for j in 0..action.g.dim() {
                let lhs = action.apply(&action.g.bracket_basis(i, j));
                let r = &lhs - &action.fields[i].lie_bracket(&action.fields[j]);
                if !r.is_zero() {
                    return Err(ActionError::NotHomomorphism {
                        i,
                        j,
                        residual: r.to_string(),
                    });
                }
            }
        }
        Ok(action)
    }

    pub fn algebra(&self) -> &FiniteLieAlgebra<Rational> {
        &self.g
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn patch(&self) -> &Patch {
        self.fields[0].patch()
    }

    /// `ψ(ξ)` for `ξ` in basis coordinates.
    pub fn apply(&self, xi: &[Rational]) -> VectorField {
        combine_fields(self.patch(), &self.fields, xi)
    }
}

/// A Courant algebra `π: a → g` acting on `TM ⊕ T*M` twisted by `H`.
///
/// Construction validates shapes only; the action axioms are itemized by
/// [`check_extension`] so that broken actions can still be inspected.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedAction {
    ca: CourantAlgebraSpec<Rational>,
    psi: InfinitesimalAction,
    rho: Vec<GeneralizedSection>,
    twist: Twist,
}

impl ExtendedAction {
    pub fn new(
        ca: CourantAlgebraSpec<Rational>,
        psi: InfinitesimalAction,
        rho: Vec<GeneralizedSection>,
        twist: Twist,
    ) -> Result<Self, ActionError> {
        if ca.g.dim() != psi.algebra().dim() || ca.g.as_leibniz().constants() != psi.algebra().as_leibniz().constants()
        {
            return Err(ActionError::Dimension("pi and psi use different Lie algebras".into()));
        }
        if rho.len() != ca.a.dim() {
            return Err(ActionError::Dimension(format!(
                "{} sections for a {}-dimensional Courant algebra",
                rho.len(),
                ca.a.dim()
            )));
        }
        let patch = psi.patch();
        if twist.patch() != patch || rho.iter().any(|s| s.patch() != patch) {
            return Err(ActionError::PatchMismatch);
        }
        if twist.order() != 1 {
            return Err(ActionError::OrderNotOne(twist.order()));
        }
        if let Some(s) = rho.iter().find(|s| s.order() != 1) {
            return Err(ActionError::OrderNotOne(s.order()));
        }
        Ok(ExtendedAction { ca, psi, rho, twist })
    }

    pub fn courant_algebra(&self) -> &CourantAlgebraSpec<Rational> {
        &self.ca
    }

    pub fn psi(&self) -> &InfinitesimalAction {
        &self.psi
    }

    pub fn rho(&self) -> &[GeneralizedSection] {
        &self.rho
    }

    pub fn twist(&self) -> &Twist {
        &self.twist
    }

    pub fn patch(&self) -> &Patch {
        self.psi.patch()
    }

    pub fn names(&self) -> &[String] {
        self.ca.a.names()
    }

    /// `ρ(a)` for `a` in basis coordinates.
    pub fn apply(&self, a: &[Rational]) -> GeneralizedSection {
        a.iter()
            .zip(&self.rho)
            .filter(|(c, _)| !c.is_zero())
            .fold(GeneralizedSection::zero(self.patch(), 1), |acc, (c, s)| {
                &acc + &s.scale(&constant(c))
            })
    }

    /// Replaces `ρ(e_i)`; used for negative controls and mutation tests.
    pub fn with_rho(&self, i: usize, s: GeneralizedSection) -> Result<Self, ActionError> {
        let mut rho = self.rho.clone();
        rho[i] = s;
        Self::new(self.ca.clone(), self.psi.clone(), rho, self.twist.clone())
    }

    fn bracket_dorfman(&self, s: &GeneralizedSection, t: &GeneralizedSection) -> GeneralizedSection {
        dorfman(&self.twist, s, t).expect("sections validated against the twist")
    }

    fn kernel_names(&self) -> Vec<String> {
        kernel_labels(&self.ca)
    }
}

/// Names for the kernel basis: the `a`-basis name for unit vectors, `k<i>`
/// otherwise.
fn kernel_labels(ca: &CourantAlgebraSpec<Rational>) -> Vec<String> {
    ca.kernel()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let nonzero: Vec<usize> = (0..v.len()).filter(|&j| !v[j].is_zero()).collect();
            match nonzero[..] {
                [j] if v[j] == Rational::from_integer(1.into()) => ca.a.names()[j].clone(),
                _ => format!("k{}", i + 1),
            }
        })
        .collect()
}

/// Values of `μ` on the basis of `ker π` returned by
/// [`CourantAlgebraSpec::kernel`].
#[derive(Clone, Debug, PartialEq)]
pub struct MomentMap {
    values: Vec<ScalarField>,
}

impl MomentMap {
    pub fn new(values: Vec<ScalarField>) -> Self {
        MomentMap { values }
    }

    pub fn values(&self) -> &[ScalarField] {
        &self.values
    }

    /// `μ(η)` for `η` in kernel-basis coordinates.
    pub fn apply(&self, eta: &[Rational]) -> ScalarField {
        combine_scalars(&self.values, eta)
    }
}

/// Admissibility of every `ρ(e_a)`, diagonal adjoint action on probes, the
/// morphism property on basis pairs, the anchor square `X_a = ψ(π(a))`, and
/// closed, vector-free images of `ker π`.
pub fn check_extension(ea: &ExtendedAction) -> Report {
    let mut r = Report::new("extended action");
    let names = ea.names();
    let n = names.len();
    let patch = ea.patch();
    let probes = standard_probes(patch, 1);
    for (a, s) in ea.rho.iter().enumerate() {
        let v = is_admissible_pair(&ea.twist, s).expect("validated section");
        r.verdict(format!("admissible[{}]", names[a]), &v, |w| {
            format!("d alpha + i_X H = {w}")
        });
        let v = adjoint_is_diagonal(&ea.twist, s, &probes).expect("validated section");
        r.verdict(format!("diagonal[{}]", names[a]), &v, |w| {
            format!(
                "probe {}: bracket {} vs diagonal {}",
                probes[w.probe], w.bracket, w.diagonal
            )
        });
        let expected = ea.psi.apply(&ea.ca.pi.image_of_basis(a));
        if s.vector() == &expected {
            r.pass(format!("anchor[{}]", names[a]));
        } else {
            r.fail(
                format!("anchor[{}]", names[a]),
                format!("X = {} but psi(pi(a)) = {}", s.vector(), expected),
            );
        }
    }
    for a in 0..n {
        for b in 0..n {
            let lhs = ea.apply(&ea.ca.a.bracket_basis(a, b));
            let rhs = ea.bracket_dorfman(&ea.rho[a], &ea.rho[b]);
            let name = format!("morphism[{},{}]", names[a], names[b]);
            if lhs == rhs {
                r.pass(name);
            } else {
                r.fail(name, format!("rho([a,b]) = {lhs} but [rho(a), rho(b)]_H = {rhs}"));
            }
        }
    }
    for (k, (v, label)) in ea.ca.kernel().iter().zip(ea.kernel_names()).enumerate() {
        let s = ea.apply(v);
        if s.vector().is_zero() {
            r.pass(format!("kernel-vector[{label}]"));
        } else {
            r.fail(
                format!("kernel-vector[{label}]"),
                format!("kernel vector {k} has X = {}", s.vector()),
            );
        }
        let d = s.form().exterior_derivative();
        if d.is_zero() {
            r.pass(format!("kernel-closed[{label}]"));
        } else {
            r.fail(format!("kernel-closed[{label}]"), format!("d nu = {d}"));
        }
    }
    r
}

fn check_patch(psi: &InfinitesimalAction, form: &DifferentialForm) -> Result<(), ActionError> {
    if form.patch() != psi.patch() {
        return Err(ActionError::PatchMismatch);
    }
    Ok(())
}

/// Rank of the antisymmetric coefficient matrix `ω(∂_i, ∂_j)`.
fn two_form_rank(omega: &DifferentialForm) -> usize {
    let n = omega.patch().dim();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let c = omega.coefficient(&[i, j]);
            m.set(i, j, c.clone());
            m.set(j, i, -&c);
        }
    }
    m.rank()
}

/// `ρ(ξ, η) = (X_ξ, i_{X_η} ω)` on `g ⊕ g` with the adjoint module and no
/// twist.
pub fn symplectic_extension(
    psi: &InfinitesimalAction,
    omega: &DifferentialForm,
) -> Result<ExtendedAction, ActionError> {
    check_patch(psi, omega)?;
    if omega.degree() != 2 {
        return Err(ActionError::Dimension(format!(
            "expected a 2-form, found degree {}",
            omega.degree()
        )));
    }
    let d = omega.exterior_derivative();
    if !d.is_zero() {
        return Err(ActionError::NotClosed(d.to_string()));
    }
    let patch = psi.patch();
    let rank = two_form_rank(omega);
    if rank < patch.dim() {
        return Err(ActionError::Degenerate { rank, dim: patch.dim() });
    }
    let g = psi.algebra();
    let mut alphas = Vec::new();
    for (i, x) in psi.fields().iter().enumerate() {
        let alpha = omega.interior_product(x)?;
        let d = alpha.exterior_derivative();
        if !d.is_zero() {
            return Err(ActionError::NotSymplecticField {
                xi: g.names()[i].clone(),
                residual: d.to_string(),
            });
        }
        alphas.push(alpha);
    }
    let ca = hemisemidirect(g, &GModule::adjoint(g));
    let mut rho: Vec<GeneralizedSection> = psi
        .fields()
        .iter()
        .map(|x| GeneralizedSection::from_vector(x.clone(), 1))
        .collect();
    rho.extend(alphas.into_iter().map(GeneralizedSection::from_form));
    ExtendedAction::new(ca, psi.clone(), rho, Twist::zero(patch, 1))
}

/// `ρ(ξ, η) = (X_ξ, dμ(η) + i_{X_ξ} h)` on the hemisemidirect product
/// `g ⊕ module`, twisted by `H = dh`.
///
/// Requires `μ(ξ·η) = X_ξ(μ(η))` and `L_{X_ξ} h = 0` on basis elements.
pub fn build_twisted_extension(
    psi: &InfinitesimalAction,
    h: &DifferentialForm,
    module: &GModule<Rational>,
    mu_eq: &[ScalarField],
) -> Result<ExtendedAction, ActionError> {
    check_patch(psi, h)?;
    if h.degree() != 2 {
        return Err(ActionError::Dimension(format!(
            "expected a 2-form, found degree {}",
            h.degree()
        )));
    }
    let g = psi.algebra();
    if module.algebra().as_leibniz().constants() != g.as_leibniz().constants() || module.algebra().dim() != g.dim() {
        return Err(ActionError::Dimension("module is over a different Lie algebra".into()));
    }
    let patch = psi.patch();
    if let Verdict::Fails(w) = check_equivariant(module, patch, psi.fields(), mu_eq)? {
        return Err(ActionError::NotEquivariant {
            xi: g.names()[w.xi].clone(),
            eta: module.names()[w.eta].clone(),
            lhs: w.lhs,
            rhs: w.rhs,
        });
    }
    for (i, x) in psi.fields().iter().enumerate() {
        let l = h.lie_derivative(x);
        if !l.is_zero() {
            return Err(ActionError::NotInvariant {
                xi: g.names()[i].clone(),
                residual: l.to_string(),
            });
        }
    }
    let ca = hemisemidirect(g, module);
    let mut rho = Vec::new();
    for x in psi.fields() {
        rho.push(GeneralizedSection::new(x.clone(), h.interior_product(x)?)?);
    }
    for m in mu_eq {
        rho.push(GeneralizedSection::from_form(DifferentialForm::exact(patch, m)));
    }
    let twist = Twist::new(h.exterior_derivative())?;
    ExtendedAction::new(ca, psi.clone(), rho, twist)
}

/// The diagonal action `ρ(ξ, η) = (X_ξ, i_{X_ξ} h)` on `g ⊕ g`, a Dirac
/// action on the graph of `h` twisted by `dh`.
pub fn diagonal_extension(psi: &InfinitesimalAction, h: &DifferentialForm) -> Result<ExtendedAction, ActionError> {
    let g = psi.algebra();
    let adjoint = GModule::adjoint(g);
    let zero = vec![ScalarField::zero(); g.dim()];
    build_twisted_extension(psi, h, &adjoint, &zero)
}

/// Membership of every `ρ(e_a)` in `D`, preservation of `D` under
/// `[ρ(e_a), ·]_H` on its generators, and `L_{X_a} H = 0`.
pub fn check_dirac_action(ea: &ExtendedAction, d: &DiracStructure) -> Result<Report, ActionError> {
    if d.twist() != ea.twist() {
        return Err(ActionError::TwistMismatch);
    }
    let mut r = Report::new("dirac action");
    let names = ea.names();
    for (a, s) in ea.rho.iter().enumerate() {
        let name = format!("membership[{}]", names[a]);
        match d.membership_with_locus(s) {
            Some((_, locus)) => {
                r.pass(name);
                for f in locus {
                    r.add_locus(d.patch().show(&f).to_string());
                }
            }
            None => {
                r.fail(name, format!("rho = {s} is not in the span of the generators"));
            }
        }
        for (j, gen) in d.generators().iter().enumerate() {
            let b = ea.bracket_dorfman(s, gen);
            let name = format!("preservation[{},{}]", names[a], j);
            if d.contains(&b) {
                r.pass(name);
            } else {
                r.fail(name, format!("[rho, e_{j}]_H = {b}"));
            }
        }
        let l = ea.twist.form().lie_derivative(s.vector());
        if l.is_zero() {
            r.pass(format!("twist-symmetry[{}]", names[a]));
        } else {
            r.fail(format!("twist-symmetry[{}]", names[a]), format!("L_X H = {l}"));
        }
    }
    Ok(r)
}

/// `X_{[a,b]} = L_{X_a} X_b` and `α_{[a,b]} = L_{X_a} α_b` on all basis
/// pairs.
pub fn check_lemma_equivariance(ea: &ExtendedAction) -> Report {
    let mut r = Report::new("lemma equivariance");
    let names = ea.names();
    for a in 0..names.len() {
        for b in 0..names.len() {
            let s = ea.apply(&ea.ca.a.bracket_basis(a, b));
            let (sa, sb) = (&ea.rho[a], &ea.rho[b]);
            let pair = format!("{},{}", names[a], names[b]);
            let lx = sa.vector().lie_bracket(sb.vector());
            if s.vector() == &lx {
                r.pass(format!("vector[{pair}]"));
            } else {
                r.fail(
                    format!("vector[{pair}]"),
                    format!("X_[a,b] = {} but L_Xa Xb = {lx}", s.vector()),
                );
            }
            let la = sb.form().lie_derivative(sa.vector());
            if s.form() == &la {
                r.pass(format!("form[{pair}]"));
            } else {
                r.fail(
                    format!("form[{pair}]"),
                    format!("alpha_[a,b] = {} but L_Xa alpha_b = {la}", s.form()),
                );
            }
        }
    }
    r
}

/// Coordinates of `a` in the basis formed by lifts of the `g` basis followed
/// by the kernel basis, when that basis exists.
fn split_coordinates(ca: &CourantAlgebraSpec<Rational>) -> Option<Matrix<Rational>> {
    let n = ca.a.dim();
    let mut cols: Vec<Vec<Rational>> = Vec::new();
    for i in 0..ca.g.dim() {
        cols.push(ca.lift(i)?);
    }
    cols.extend(ca.kernel());
    if cols.len() != n {
        return None;
    }
    let m = Matrix::from_columns(&cols, n);
    (m.rank() == n).then_some(m)
}

/// The order-0 section `ρ₀(a) = (ψ(π(a)), μ(a_h))`, where `a_h` is the
/// kernel component of `a` relative to the chosen lifts.
pub fn order0_section(ea: &ExtendedAction, mm: &MomentMap, a: &[Rational]) -> Option<(VectorField, ScalarField)> {
    let basis = split_coordinates(&ea.ca)?;
    let c = basis.solve(a)?;
    let n = ea.ca.g.dim();
    let x = ea.psi.apply(&ea.ca.pi.apply(a));
    Some((x, mm.apply(&c[n..])))
}

/// `dμ = ν` on the kernel basis, equivariance `dμ(ξ·η) = L_{ψ(ξ)} dμ(η)`,
/// and the commuting squares relating `ρ₀`, `ρ` and `d`.
pub fn check_moment_map(ea: &ExtendedAction, mm: &MomentMap) -> Result<Report, ActionError> {
    let kernel = ea.ca.kernel();
    if kernel.len() != mm.values.len() {
        return Err(ActionError::Dimension(format!(
            "{} moment-map values for a {}-dimensional kernel",
            mm.values.len(),
            kernel.len()
        )));
    }
    let mut r = Report::new("moment map");
    let patch = ea.patch();
    let labels = ea.kernel_names();
    let dmu: Vec<DifferentialForm> = mm.values.iter().map(|m| DifferentialForm::exact(patch, m)).collect();
    for (k, v) in kernel.iter().enumerate() {
        let nu = ea.apply(v);
        let name = format!("nu=dmu[{}]", labels[k]);
        if nu.vector().is_zero() && nu.form() == &dmu[k] {
            r.pass(name);
        } else {
            r.fail(name, format!("nu = {nu} but d mu = {}", dmu[k]));
        }
    }
    match induced_module_action(&ea.ca) {
        Ok(module) => {
            if let Verdict::Fails(w) = check_equivariant(&module, patch, ea.psi.fields(), &dmu)? {
                r.fail(
                    format!("equivariance[{},{}]", ea.ca.g.names()[w.xi], labels[w.eta]),
                    format!("d mu(xi.eta) = {} but L_X d mu(eta) = {}", w.lhs, w.rhs),
                );
            } else {
                r.pass("equivariance");
            }
        }
        Err(e) => {
            r.fail("equivariance", format!("no induced action on ker pi: {e}"));
        }
    }
    if split_coordinates(&ea.ca).is_none() {
        r.fail("diagram", "a does not split as lifts of g plus ker pi");
        return Ok(r);
    }
    let names = ea.names();
    let n = names.len();
    for (a, label) in names.iter().enumerate() {
        let (x, _) = order0_section(ea, mm, &unit(n, a)).expect("split checked");
        let name = format!("diagram/anchor[{label}]");
        if &x == ea.rho[a].vector() {
            r.pass(name);
        } else {
            r.fail(
                name,
                format!("rho_0 has X = {x} but rho has X = {}", ea.rho[a].vector()),
            );
        }
    }
    for (k, v) in kernel.iter().enumerate() {
        let (x, f) = order0_section(ea, mm, v).expect("split checked");
        let df = DifferentialForm::exact(patch, &f);
        let s = ea.apply(v);
        let name = format!("diagram/kernel[{}]", labels[k]);
        if x.is_zero() && &df == s.form() {
            r.pass(name);
        } else {
            r.fail(name, format!("d of rho_0 = {df} but rho = {s}"));
        }
    }
    Ok(r)
}

/// `μ_{π̄(a)}` for `a` in basis coordinates, where `π̄(a)` is the kernel
/// vector with the coordinates of `π(a)`.
fn mu_bar(ea: &ExtendedAction, mm: &MomentMap, a: &[Rational]) -> ScalarField {
    mm.apply(&ea.ca.pi.apply(a))
}

fn require_doubled(ea: &ExtendedAction, mm: &MomentMap) -> Result<(), ActionError> {
    let (g, kernel) = (ea.ca.g.dim(), ea.ca.kernel().len());
    if g != kernel {
        return Err(ActionError::NotDoubled { g, kernel });
    }
    if mm.values.len() != kernel {
        return Err(ActionError::Dimension(format!(
            "{} moment-map values for a {kernel}-dimensional kernel",
            mm.values.len()
        )));
    }
    Ok(())
}

/// `α_a = dμ_{π̄(a)}` on every basis element of `g ⊕ g`.
pub fn check_compatible(ea: &ExtendedAction, mm: &MomentMap) -> Result<Report, ActionError> {
    require_doubled(ea, mm)?;
    let mut r = Report::new("compatibility");
    let names = ea.names();
    for a in 0..names.len() {
        let f = mu_bar(ea, mm, &unit(names.len(), a));
        let df = DifferentialForm::exact(ea.patch(), &f);
        let alpha = ea.rho[a].form();
        let name = format!("compatible[{}]", names[a]);
        if &df == alpha {
            r.pass(name);
        } else {
            r.fail(name, format!("alpha = {alpha} but d mu = {df}"));
        }
    }
    Ok(r)
}

/// Output of [`pi_mu`]: the itemized report, the images `Π_μ(e_a)` and the
/// bracket table `{Π_μ(e_a), Π_μ(e_b)}` (empty when some image is not
/// admissible).
#[derive(Clone, Debug, PartialEq)]
pub struct PiMu {
    pub report: Report,
    pub images: Vec<ScalarField>,
    pub table: Vec<Vec<ScalarField>>,
    /// All brackets vanish and every Hamiltonian field annihilates `H`.
    pub constants_of_motion: bool,
}

/// Checks that `Π_μ(a) = μ_{π̄(a)}` maps into admissible functions as a
/// Leibniz algebra morphism. Prerequisites (Dirac action, compatibility)
/// are reported as items.
pub fn pi_mu(ea: &ExtendedAction, mm: &MomentMap, d: &DiracStructure) -> Result<PiMu, ActionError> {
    require_doubled(ea, mm)?;
    let mut report = Report::new("pi_mu");
    report.absorb("prerequisite/dirac-action/", check_dirac_action(ea, d)?);
    report.absorb("prerequisite/", check_compatible(ea, mm)?);
    let names = ea.names();
    let n = names.len();
    let patch = ea.patch();
    let images: Vec<ScalarField> = (0..n).map(|a| mu_bar(ea, mm, &unit(n, a))).collect();
    let mut admissible: Vec<AdmissibleFunction> = Vec::new();
    for (a, f) in images.iter().enumerate() {
        let name = format!("admissible[{}]", names[a]);
        match is_h_admissible_with_locus(d, f) {
            Some((af, locus)) => {
                report.pass(name).with_detail(format!("X = {}", af.field()));
                for l in locus {
                    report.add_locus(patch.show(&l).to_string());
                }
                admissible.push(af);
            }
            None => {
                report.fail(
                    name,
                    format!("{} has no Hamiltonian field annihilating H", patch.show(f)),
                );
            }
        }
    }
    if admissible.len() == n {
        for (a, f) in images.iter().enumerate() {
            let anchored = GeneralizedSection::new(ea.rho[a].vector().clone(), DifferentialForm::exact(patch, f))?;
            let name = format!("bottom-triangle[{}]", names[a]);
            if d.contains(&anchored) {
                report.pass(name);
            } else {
                report.fail(name, format!("(X_a, d mu) = {anchored} is not in the Dirac structure"));
            }
        }
    }
    let mut table: Vec<Vec<ScalarField>> = Vec::new();
    let mut constants_of_motion = false;
    if admissible.len() == n {
        table = admissible
            .iter()
            .map(|f| admissible.iter().map(|g| f.bracket(g)).collect())
            .collect();
        for a in 0..n {
            for b in 0..n {
                let lhs = combine_scalars(&images, &ea.ca.a.bracket_basis(a, b));
                let rhs: &ScalarField = &table[a][b];
                let name = format!("morphism[{},{}]", names[a], names[b]);
                if &lhs == rhs {
                    report.pass(name);
                } else {
                    report.fail(
                        name,
                        format!(
                            "Pi([a,b]) = {} but {{Pi(a), Pi(b)}} = {}",
                            patch.show(&lhs),
                            patch.show(rhs)
                        ),
                    );
                }
            }
        }
        let h = ea.twist.form();
        let annihilates =
            |x: &VectorField| h.is_zero() || x.is_zero() || h.interior_product(x).expect("same patch").is_zero();
        constants_of_motion =
            table.iter().flatten().all(|v| v.is_zero()) && admissible.iter().all(|f| annihilates(f.field()));
        if constants_of_motion {
            report.note("the image consists of constants of motion");
        }
    }
    Ok(PiMu {
        report,
        images,
        table,
        constants_of_motion,
    })
}

fn integrate(p: &Polynomial<Rational>, var: usize) -> Polynomial<Rational> {
    Polynomial::from_terms(p.terms().map(|(m, c)| {
        let mut e = m.exponents().to_vec();
        if e.len() <= var {
            e.resize(var + 1, 0);
        }
        e[var] += 1;
        let k = Rational::from_integer(e[var].into());
        (Monomial::from_exponents(e), c / &k)
    }))
}

/// A polynomial `f` with `df = α` for a closed 1-form with polynomial
/// coefficients, normalized to vanish at the origin.
pub fn antiderivative(alpha: &DifferentialForm) -> Result<ScalarField, ActionError> {
    if alpha.degree() != 1 {
        return Err(ActionError::NoAntiderivative(format!(
            "expected a 1-form, found degree {}",
            alpha.degree()
        )));
    }
    let patch = alpha.patch();
    let d = alpha.exterior_derivative();
    if !d.is_zero() {
        return Err(ActionError::NotClosed(d.to_string()));
    }
    let mut f = ScalarField::zero();
    for i in 0..patch.dim() {
        let rest = &alpha.coefficient(&[i]) - &f.derivative(i);
        if !rest.is_polynomial() {
            return Err(ActionError::NoAntiderivative(format!(
                "coefficient of d{} is not polynomial",
                patch.names()[i]
            )));
        }
        f = &f + &ScalarField::from_polynomial(integrate(rest.numerator(), i));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_form, parse_scalar, parse_vector_field};

    fn r4() -> Patch {
        Patch::new(["x1", "y1", "x2", "y2"]).unwrap()
    }

    fn r2() -> Patch {
        Patch::new(["x", "y"]).unwrap()
    }

    fn h4(p: &Patch) -> DifferentialForm {
        parse_form(p, "(1 + x1^2)*(dx1^dy1 + dx2^dy2)", Some(2)).unwrap()
    }

    fn line(p: &Patch, field: &str) -> InfinitesimalAction {
        InfinitesimalAction::new(
            FiniteLieAlgebra::abelian(1),
            vec![parse_vector_field(p, field).unwrap()],
        )
        .unwrap()
    }

    fn q(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    #[test]
    fn psi_must_be_a_homomorphism() {
        let p = r2();
        let g = FiniteLieAlgebra::abelian(2);
        let fields = vec![
            parse_vector_field(&p, "@x").unwrap(),
            parse_vector_field(&p, "x*@y").unwrap(),
        ];
        assert!(matches!(
            InfinitesimalAction::new(g, fields),
            Err(ActionError::NotHomomorphism { .. })
        ));
    }

    #[test]
    fn symplectic_translation_passes() {
        let p = r2();
        let omega = parse_form(&p, "dx^dy", Some(2)).unwrap();
        let ea = symplectic_extension(&line(&p, "@x"), &omega).unwrap();
        assert_eq!(ea.rho()[1].form(), &parse_form(&p, "dy", Some(1)).unwrap());
        let r = check_extension(&ea);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn symplectic_rotation_passes() {
        let p = r2();
        let omega = parse_form(&p, "dx^dy", Some(2)).unwrap();
        let ea = symplectic_extension(&line(&p, "x*@y - y*@x"), &omega).unwrap();
        assert_eq!(ea.rho()[1].form(), &parse_form(&p, "-x*dx - y*dy", Some(1)).unwrap());
        assert!(check_extension(&ea).passed());
    }

    #[test]
    fn non_symplectic_field_is_rejected() {
        let p = r2();
        let omega = parse_form(&p, "dx^dy", Some(2)).unwrap();
        let err = symplectic_extension(&line(&p, "x*@x"), &omega).unwrap_err();
        assert!(matches!(err, ActionError::NotSymplecticField { .. }), "{err}");
    }

    #[test]
    fn twisted_extension_on_example_data() {
        let p = r4();
        let psi = line(&p, "@y1");
        let g = psi.algebra().clone();
        let ea = build_twisted_extension(&psi, &h4(&p), &GModule::trivial(&g, 1), &[ScalarField::zero()]).unwrap();
        assert!(!ea.twist().is_zero());
        let r = check_extension(&ea);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn non_invariant_h_is_rejected() {
        let p = r4();
        let psi = line(&p, "@x1");
        let g = psi.algebra().clone();
        let err = build_twisted_extension(&psi, &h4(&p), &GModule::trivial(&g, 1), &[ScalarField::zero()]).unwrap_err();
        match err {
            ActionError::NotInvariant { residual, .. } => {
                let expected = parse_form(&p, "2*x1*(dx1^dy1 + dx2^dy2)", Some(2)).unwrap();
                assert_eq!(residual, expected.to_string());
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn non_admissible_image_fails_item() {
        let p = r4();
        let ea = diagonal_extension(&line(&p, "@y1"), &h4(&p)).unwrap();
        let bad = GeneralizedSection::new(
            VectorField::coordinate(&p, 1),
            parse_form(&p, "x2*dy1", Some(1)).unwrap(),
        )
        .unwrap();
        let r = check_extension(&ea.with_rho(0, bad).unwrap());
        let item = r.item("admissible[e1]").unwrap();
        assert!(!item.passed);
        assert!(item.witness.is_some());
    }

    #[test]
    fn non_closed_kernel_image_fails() {
        let p = r2();
        let omega = parse_form(&p, "dx^dy", Some(2)).unwrap();
        let ea = symplectic_extension(&line(&p, "@x"), &omega).unwrap();
        let bad = GeneralizedSection::from_form(parse_form(&p, "x*dy", Some(1)).unwrap());
        let r = check_extension(&ea.with_rho(1, bad).unwrap());
        assert!(!r.item("kernel-closed[e1']").unwrap().passed);
    }

    #[test]
    fn example_dirac_action_and_theorem() {
        let p = r4();
        let h = h4(&p);
        let ea = diagonal_extension(&line(&p, "@y1"), &h).unwrap();
        let d = DiracStructure::graph_of_two_form(&h, ea.twist().clone()).unwrap();
        let r = check_dirac_action(&ea, &d).unwrap();
        assert!(r.passed(), "{r}");
        assert!(check_lemma_equivariance(&ea).passed());
        let mu = antiderivative(&parse_form(&p, "-(1 + x1^2)*dx1", Some(1)).unwrap()).unwrap();
        assert_eq!(mu, parse_scalar(&p, "-(x1 + x1^3/3)").unwrap());
        let mm = MomentMap::new(vec![mu]);
        assert!(check_compatible(&ea, &mm).unwrap().passed());
        let out = pi_mu(&ea, &mm, &d).unwrap();
        assert!(out.report.passed(), "{}", out.report);
        assert!(out.constants_of_motion);
        assert!(out.table.iter().flatten().all(|v| v.is_zero()));
        assert!(!check_compatible(&ea, &MomentMap::new(vec![ScalarField::zero()]))
            .unwrap()
            .passed());
    }

    #[test]
    fn non_diagonal_rho_fails_membership() {
        let p = r4();
        let h = h4(&p);
        let psi = line(&p, "@y1");
        let g = psi.algebra().clone();
        let mu = parse_scalar(&p, "-(x1 + x1^3/3)").unwrap();
        let ea = build_twisted_extension(&psi, &h, &GModule::trivial(&g, 1), &[mu]).unwrap();
        assert!(check_extension(&ea).passed());
        let d = DiracStructure::graph_of_two_form(&h, ea.twist().clone()).unwrap();
        let r = check_dirac_action(&ea, &d).unwrap();
        assert!(r.item("membership[e1]").unwrap().passed);
        assert!(!r.item("membership[v1]").unwrap().passed);
        let other = Twist::zero(&p, 1);
        assert!(matches!(
            check_dirac_action(&ea, &DiracStructure::cotangent(&p, other).unwrap()),
            Err(ActionError::TwistMismatch)
        ));
    }

    #[test]
    fn translation_moment_map() {
        let p = r2();
        let omega = parse_form(&p, "dx^dy", Some(2)).unwrap();
        let psi = line(&p, "@x");
        let ea = symplectic_extension(&psi, &omega).unwrap();
        let y = parse_scalar(&p, "y").unwrap();
        let r = check_moment_map(&ea, &MomentMap::new(vec![y.clone()])).unwrap();
        assert!(r.passed(), "{r}");
        let shifted = parse_scalar(&p, "y + 1").unwrap();
        assert!(check_moment_map(&ea, &MomentMap::new(vec![shifted])).unwrap().passed());
        let x = parse_scalar(&p, "x").unwrap();
        assert!(
            !check_moment_map(&ea, &MomentMap::new(vec![x]))
                .unwrap()
                .item("nu=dmu[e1']")
                .unwrap()
                .passed
        );

        let diag = diagonal_extension(&psi, &omega).unwrap();
        assert!(diag.twist().is_zero());
        let d = DiracStructure::graph_of_two_form(&omega, diag.twist().clone()).unwrap();
        let mm = MomentMap::new(vec![y]);
        assert!(check_compatible(&diag, &mm).unwrap().passed());
        let out = pi_mu(&diag, &mm, &d).unwrap();
        assert!(out.report.passed(), "{}", out.report);
    }

    #[test]
    fn affine_moment_map_is_a_morphism() {
        // g = span(e1, e2) with [e1, e2] = e2 acting by x∂x − y∂y and ∂y
        let p = r2();
        let g = FiniteLieAlgebra::new(
            crate::leibniz::FiniteLeibnizAlgebra::new(["e1", "e2"], [(0, 1, 1, q(1)), (1, 0, 1, q(-1))]).unwrap(),
        )
        .unwrap();
        let fields = vec![
            parse_vector_field(&p, "x*@x - y*@y").unwrap(),
            parse_vector_field(&p, "@y").unwrap(),
        ];
        let psi = InfinitesimalAction::new(g, fields).unwrap();
        let omega = parse_form(&p, "dx^dy", Some(2)).unwrap();
        let sym = symplectic_extension(&psi, &omega).unwrap();
        assert!(check_extension(&sym).passed());
        let mus: Vec<ScalarField> = sym.rho()[2..]
            .iter()
            .map(|s| antiderivative(s.form()).unwrap())
            .collect();
        let mm = MomentMap::new(mus);
        assert!(check_moment_map(&sym, &mm).unwrap().passed());
        let diag = diagonal_extension(&psi, &omega).unwrap();
        let d = DiracStructure::graph_of_two_form(&omega, diag.twist().clone()).unwrap();
        let out = pi_mu(&diag, &mm, &d).unwrap();
        assert!(out.report.passed(), "{}", out.report);
        assert!(!out.constants_of_motion);
    }

    #[test]
    fn antiderivative_rejects_rational_and_open_forms() {
        let p = r2();
        let f = antiderivative(&parse_form(&p, "2*x*y*dx + x^2*dy", Some(1)).unwrap()).unwrap();
        assert_eq!(f, parse_scalar(&p, "x^2*y").unwrap());
        assert!(antiderivative(&parse_form(&p, "1/(1 + x^2)*dx", Some(1)).unwrap()).is_err());
        assert!(matches!(
            antiderivative(&parse_form(&p, "y*dx", Some(1)).unwrap()),
            Err(ActionError::NotClosed(_))
        ));
    }

    #[test]
    fn lemma_detects_corrupted_rho() {
        let p = r2();
        let omega = parse_form(&p, "dx^dy", Some(2)).unwrap();
        let psi = InfinitesimalAction::new(
            FiniteLieAlgebra::abelian(2),
            vec![
                parse_vector_field(&p, "@x").unwrap(),
                parse_vector_field(&p, "@y").unwrap(),
            ],
        )
        .unwrap();
        let ea = diagonal_extension(&psi, &omega).unwrap();
        assert!(check_lemma_equivariance(&ea).passed());
        let bad = GeneralizedSection::new(
            parse_vector_field(&p, "@x").unwrap(),
            parse_form(&p, "x*dy", Some(1)).unwrap(),
        )
        .unwrap();
        assert!(!check_lemma_equivariance(&ea.with_rho(0, bad).unwrap()).passed());
    }

    #[test]
    fn order0_section_splits_hemisemidirect() {
        let p = r2();
        let omega = parse_form(&p, "dx^dy", Some(2)).unwrap();
        let ea = symplectic_extension(&line(&p, "@x"), &omega).unwrap();
        let mm = MomentMap::new(vec![parse_scalar(&p, "y").unwrap()]);
        let (x, f) = order0_section(&ea, &mm, &[q(2), q(3)]).unwrap();
        assert_eq!(x, parse_vector_field(&p, "2*@x").unwrap());
        assert_eq!(f, parse_scalar(&p, "3*y").unwrap());
    }
}
