//! Finite-dimensional Leibniz, Lie and Courant algebras given by structure
//! constants, with exhaustive identity checks over basis tuples.
//!
//! Brackets are left Leibniz: `[a, [b, c]] = [[a, b], c] + [b, [a, c]]`.

use std::fmt::{self, Display};

use num_traits::Zero;
use thiserror::Error;

use crate::exterior::{LieTransport, VectorField};
use crate::field::Field;
use crate::linalg::Matrix;
use crate::report::{Report, Verdict};
use crate::scalar::{Patch, ScalarField};
use crate::Rational;

/// Basis indices at which an identity fails, with the nonzero residual.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisWitness<F> {
    pub indices: Vec<usize>,
    pub residual: Vec<F>,
}

impl<F: Display> Display for BasisWitness<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        let res: Vec<String> = self.residual.iter().map(|v| v.to_string()).collect();
        write!(f, "basis ({}) residual [{}]", idx.join(", "), res.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LeibnizError {
    #[error("structure constant index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("matrix is {found_rows}x{found_cols}, expected {rows}x{cols}")]
    Shape {
        rows: usize,
        cols: usize,
        found_rows: usize,
        found_cols: usize,
    },
    #[error("not a Lie algebra: {0}")]
    NotLie(String),
    #[error("not a g-module: {0}")]
    NotModule(String),
    #[error("equivariance precondition fails at {0}")]
    Precondition(String),
    #[error("resulting bracket is not Leibniz at {0}")]
    NotLeibniz(String),
    #[error("Courant algebra is not exact: {0}")]
    NotExact(String),
    #[error("induced action depends on the lift at {0}")]
    IllDefinedAction(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

fn add_scaled<F: Field>(acc: &mut [F], c: &F, v: &[F]) {
    if c.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(v) {
        if !b.is_zero() {
            *a = a.clone() + c.clone() * b.clone();
        }
    }
}

fn is_zero_vec<F: Field>(v: &[F]) -> bool {
    v.iter().all(|x| x.is_zero())
}

fn sub_vec<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

fn unit<F: Field>(n: usize, i: usize) -> Vec<F> {
    let mut v = vec![F::zero(); n];
    v[i] = F::one();
    v
}

/// An algebra `[e_i, e_j] = Σ_k c[i][j][k] e_k`; identities are checked on
/// demand.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteLeibnizAlgebra<F> {
    names: Vec<String>,
    c: Vec<F>,
}

impl<F: Field + Display> FiniteLeibnizAlgebra<F> {
    /// Builds an algebra from its nonzero structure constants `(i, j, k, c)`.
    pub fn new<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        constants: impl IntoIterator<Item = (usize, usize, usize, F)>,
    ) -> Result<Self, LeibnizError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let n = names.len();
        let mut c = vec![F::zero(); n * n * n];
        for (i, j, k, v) in constants {
            if let Some(&bad) = [i, j, k].iter().find(|&&x| x >= n) {
                return Err(LeibnizError::IndexOutOfRange(bad));
            }
            let slot = &mut c[(i * n + j) * n + k];
            *slot = slot.clone() + v;
        }
        Ok(FiniteLeibnizAlgebra { names, c })
    }

    pub fn abelian(n: usize) -> Self {
        Self::new((1..=n).map(|i| format!("e{i}")), []).expect("no constants")
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &F {
        let n = self.dim();
        &self.c[(i * n + j) * n + k]
    }

    /// Nonzero structure constants in index order.
    pub fn constants(&self) -> Vec<(usize, usize, usize, F)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.constant(i, j, k);
                    if !v.is_zero() {
                        out.push((i, j, k, v.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<F> {
        let n = self.dim();
        self.c[(i * n + j) * n..(i * n + j + 1) * n].to_vec()
    }

    pub fn bracket(&self, a: &[F], b: &[F]) -> Vec<F> {
        let n = self.dim();
        let mut out = vec![F::zero(); n];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                add_scaled(&mut out, &(ai.clone() * bj.clone()), &self.bracket_basis(i, j));
            }
        }
        out
    }

    /// `[a,[b,c]] = [[a,b],c] + [b,[a,c]]` on all basis triples.
    pub fn check_leibniz(&self) -> Verdict<BasisWitness<F>> {
        let n = self.dim();
        let e: Vec<Vec<F>> = (0..n).map(|i| unit(n, i)).collect();
        for a in 0..n {
            for b in 0..n {
                let ab = self.bracket_basis(a, b);
                for c in 0..n {
                    let lhs = self.bracket(&e[a], &self.bracket_basis(b, c));
                    let mut rhs = self.bracket(&ab, &e[c]);
                    let t = self.bracket(&e[b], &self.bracket_basis(a, c));
                    add_scaled(&mut rhs, &F::one(), &t);
                    let r = sub_vec(&lhs, &rhs);
                    if !is_zero_vec(&r) {
                        return Verdict::Fails(BasisWitness {
                            indices: vec![a, b, c],
                            residual: r,
                        });
                    }
                }
            }
        }
        Verdict::Holds
    }

    /// `[e_i, e_j] + [e_j, e_i] = 0` for all `i ≤ j`.
    pub fn check_antisymmetry(&self) -> Verdict<BasisWitness<F>> {
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                let mut s = self.bracket_basis(i, j);
                add_scaled(&mut s, &F::one(), &self.bracket_basis(j, i));
                if !is_zero_vec(&s) {
                    return Verdict::Fails(BasisWitness {
                        indices: vec![i, j],
                        residual: s,
                    });
                }
            }
        }
        Verdict::Holds
    }

    /// The cyclic Jacobi sum on all basis triples.
    pub fn check_jacobi(&self) -> Verdict<BasisWitness<F>> {
        let n = self.dim();
        let e: Vec<Vec<F>> = (0..n).map(|i| unit(n, i)).collect();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = self.bracket(&e[a], &self.bracket_basis(b, c));
                    add_scaled(&mut s, &F::one(), &self.bracket(&e[b], &self.bracket_basis(c, a)));
                    add_scaled(&mut s, &F::one(), &self.bracket(&e[c], &self.bracket_basis(a, b)));
                    if !is_zero_vec(&s) {
                        return Verdict::Fails(BasisWitness {
                            indices: vec![a, b, c],
                            residual: s,
                        });
                    }
                }
            }
        }
        Verdict::Holds
    }
}

/// A Leibniz algebra whose bracket is antisymmetric and satisfies Jacobi.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteLieAlgebra<F>(FiniteLeibnizAlgebra<F>);

impl<F: Field + Display> FiniteLieAlgebra<F> {
    pub fn new(a: FiniteLeibnizAlgebra<F>) -> Result<Self, LeibnizError> {
        if let Verdict::Fails(w) = a.check_antisymmetry() {
            return Err(LeibnizError::NotLie(format!("antisymmetry fails at {w}")));
        }
        if let Verdict::Fails(w) = a.check_jacobi() {
            return Err(LeibnizError::NotLie(format!("Jacobi fails at {w}")));
        }
        Ok(FiniteLieAlgebra(a))
    }

    pub fn abelian(n: usize) -> Self {
        FiniteLieAlgebra(FiniteLeibnizAlgebra::abelian(n))
    }

    /// `sl(2)` on the basis `e, f, h` with `[e,f] = h`, `[h,e] = 2e`,
    /// `[h,f] = -2f`.
    pub fn sl2() -> Self {
        let q = |v: i64| F::from_small(v);
        let c = vec![
            (0, 1, 2, q(1)),
            (1, 0, 2, q(-1)),
            (2, 0, 0, q(2)),
            (0, 2, 0, q(-2)),
            (2, 1, 1, q(-2)),
            (1, 2, 1, q(2)),
        ];
        Self::new(FiniteLeibnizAlgebra::new(["e", "f", "h"], c).expect("valid indices")).expect("sl2 is Lie")
    }

    pub fn as_leibniz(&self) -> &FiniteLeibnizAlgebra<F> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn names(&self) -> &[String] {
        self.0.names()
    }

    pub fn bracket(&self, a: &[F], b: &[F]) -> Vec<F> {
        self.0.bracket(a, b)
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<F> {
        self.0.bracket_basis(i, j)
    }
}

/// Small integer constants for any field.
pub trait FromSmall {
    fn from_small(v: i64) -> Self;
}

impl<F: Field> FromSmall for F {
    fn from_small(v: i64) -> Self {
        let one = F::one();
        let mut acc = F::zero();
        for _ in 0..v.unsigned_abs() {
            acc = acc + one.clone();
        }
        if v < 0 {
            -acc
        } else {
            acc
        }
    }
}

/// A linear map between algebras; `matrix` is `codomain.dim × domain.dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap<F> {
    domain: FiniteLeibnizAlgebra<F>,
    codomain: FiniteLeibnizAlgebra<F>,
    matrix: Matrix<F>,
}

impl<F: Field + Display> LinearMap<F> {
    pub fn new(
        domain: FiniteLeibnizAlgebra<F>,
        codomain: FiniteLeibnizAlgebra<F>,
        matrix: Matrix<F>,
    ) -> Result<Self, LeibnizError> {
        if matrix.rows() != codomain.dim() || matrix.cols() != domain.dim() {
            return Err(LeibnizError::Shape {
                rows: codomain.dim(),
                cols: domain.dim(),
                found_rows: matrix.rows(),
                found_cols: matrix.cols(),
            });
        }
        Ok(LinearMap {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn identity(a: &FiniteLeibnizAlgebra<F>) -> Self {
        let n = a.dim();
        let m = Matrix::from_columns(&(0..n).map(|i| unit(n, i)).collect::<Vec<_>>(), n);
        LinearMap {
            domain: a.clone(),
            codomain: a.clone(),
            matrix: m,
        }
    }

    pub fn zero(domain: &FiniteLeibnizAlgebra<F>, codomain: &FiniteLeibnizAlgebra<F>) -> Self {
        LinearMap {
            domain: domain.clone(),
            codomain: codomain.clone(),
            matrix: Matrix::zeros(codomain.dim(), domain.dim()),
        }
    }

    pub fn domain(&self) -> &FiniteLeibnizAlgebra<F> {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteLeibnizAlgebra<F> {
        &self.codomain
    }

    pub fn matrix(&self) -> &Matrix<F> {
        &self.matrix
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        self.matrix.mul_vec(v)
    }

    pub fn image_of_basis(&self, i: usize) -> Vec<F> {
        (0..self.matrix.rows()).map(|r| self.matrix.get(r, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// A basis of the kernel.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        self.matrix.nullspace()
    }
}

/// `f([e_i, e_j]) = [f(e_i), f(e_j)]` on all basis pairs.
pub fn check_morphism<F: Field + Display>(f: &LinearMap<F>) -> Verdict<BasisWitness<F>> {
    let n = f.domain.dim();
    for i in 0..n {
        let fi = f.image_of_basis(i);
        for j in 0..n {
            let lhs = f.apply(&f.domain.bracket_basis(i, j));
            let rhs = f.codomain.bracket(&fi, &f.image_of_basis(j));
            let r = sub_vec(&lhs, &rhs);
            if !is_zero_vec(&r) {
                return Verdict::Fails(BasisWitness {
                    indices: vec![i, j],
                    residual: r,
                });
            }
        }
    }
    Verdict::Holds
}

/// A representation `ξ_i · η_j = Σ_k a[i][j][k] η_k` of a Lie algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct GModule<F> {
    g: FiniteLieAlgebra<F>,
    names: Vec<String>,
    a: Vec<F>,
}

impl<F: Field + Display> GModule<F> {
    /// Builds a module from nonzero action coefficients `(i, j, k, a)` and
    /// checks `[ξ,ξ']·η = ξ·(ξ'·η) − ξ'·(ξ·η)`.
    pub fn new<S: Into<String>>(
        g: FiniteLieAlgebra<F>,
        names: impl IntoIterator<Item = S>,
        action: impl IntoIterator<Item = (usize, usize, usize, F)>,
    ) -> Result<Self, LeibnizError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let (n, m) = (g.dim(), names.len());
        let mut a = vec![F::zero(); n * m * m];
        for (i, j, k, v) in action {
            if i >= n {
                return Err(LeibnizError::IndexOutOfRange(i));
            }
            if let Some(&bad) = [j, k].iter().find(|&&x| x >= m) {
                return Err(LeibnizError::IndexOutOfRange(bad));
            }
            let slot = &mut a[(i * m + j) * m + k];
            *slot = slot.clone() + v;
        }
        let module = GModule { g, names, a };
        if let Verdict::Fails(w) = module.check_representation() {
            return Err(LeibnizError::NotModule(w.to_string()));
        }
        Ok(module)
    }

    /// `g` acting on itself by the bracket.
    pub fn adjoint(g: &FiniteLieAlgebra<F>) -> Self {
        let names = g.names().iter().map(|s| format!("{s}'"));
        let action = g.as_leibniz().constants();
        Self::new(g.clone(), names, action).expect("adjoint representation")
    }

    pub fn trivial(g: &FiniteLieAlgebra<F>, m: usize) -> Self {
        Self::new(g.clone(), (1..=m).map(|i| format!("v{i}")), []).expect("trivial representation")
    }

    pub fn algebra(&self) -> &FiniteLieAlgebra<F> {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> &F {
        let m = self.dim();
        &self.a[(i * m + j) * m + k]
    }

    /// `ξ_i · η_j` in module coordinates.
    pub fn act_basis(&self, i: usize, j: usize) -> Vec<F> {
        let m = self.dim();
        self.a[(i * m + j) * m..(i * m + j + 1) * m].to_vec()
    }

    /// `ξ · v` for `ξ ∈ g`, `v` in the module.
    pub fn act(&self, xi: &[F], v: &[F]) -> Vec<F> {
        let m = self.dim();
        let mut out = vec![F::zero(); m];
        for (i, x) in xi.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in v.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                add_scaled(&mut out, &(x.clone() * y.clone()), &self.act_basis(i, j));
            }
        }
        out
    }

    fn check_representation(&self) -> Verdict<BasisWitness<F>> {
        let (n, m) = (self.g.dim(), self.dim());
        for i in 0..n {
            let ei = unit(n, i);
            for j in 0..n {
                let ej = unit(n, j);
                let bij = self.g.bracket_basis(i, j);
                for k in 0..m {
                    let ek = unit(m, k);
                    let lhs = self.act(&bij, &ek);
                    let rhs = sub_vec(&self.act(&ei, &self.act(&ej, &ek)), &self.act(&ej, &self.act(&ei, &ek)));
                    let r = sub_vec(&lhs, &rhs);
                    if !is_zero_vec(&r) {
                        return Verdict::Fails(BasisWitness {
                            indices: vec![i, j, k],
                            residual: r,
                        });
                    }
                }
            }
        }
        Verdict::Holds
    }

    /// The module as an abelian algebra, the domain of maps out of it.
    pub fn as_abelian_algebra(&self) -> FiniteLeibnizAlgebra<F> {
        FiniteLeibnizAlgebra::new(self.names.clone(), []).expect("no constants")
    }
}

/// A Leibniz algebra `a` with a bracket-preserving map onto a Lie algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct CourantAlgebraSpec<F> {
    pub a: FiniteLeibnizAlgebra<F>,
    pub g: FiniteLieAlgebra<F>,
    pub pi: LinearMap<F>,
}

/// The quotient of `a` by the two-sided ideal generated by all squares
/// `[x, x]`, with the projection.
pub fn squares_ideal_quotient<F: Field + Display>(
    a: &FiniteLeibnizAlgebra<F>,
) -> Result<(FiniteLieAlgebra<F>, LinearMap<F>), LeibnizError> {
    let n = a.dim();
    let mut gens: Vec<Vec<F>> = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut s = a.bracket_basis(i, j);
            add_scaled(&mut s, &F::one(), &a.bracket_basis(j, i));
            if !is_zero_vec(&s) {
                gens.push(s);
            }
        }
    }
    let basis_rows = |gens: &[Vec<F>]| -> Vec<Vec<F>> {
        if gens.is_empty() {
            return Vec::new();
        }
        let r = Matrix::from_rows(gens.to_vec(), n).rref();
        (0..r.rank()).map(|i| r.matrix.row(i).to_vec()).collect()
    };
    let mut basis = basis_rows(&gens);
    loop {
        let mut next = basis.clone();
        for v in &basis {
            for k in 0..n {
                let ek = unit(n, k);
                next.push(a.bracket(&ek, v));
                next.push(a.bracket(v, &ek));
            }
        }
        let grown = basis_rows(&next);
        if grown.len() == basis.len() {
            break;
        }
        basis = grown;
    }
    // pivot columns of the ideal's echelon basis; the rest index the quotient
    let pivots: Vec<usize> = basis
        .iter()
        .map(|r| r.iter().position(|x| !x.is_zero()).expect("nonzero row"))
        .collect();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let project = |v: &[F]| -> Vec<F> {
        let mut w = v.to_vec();
        for (row, &p) in basis.iter().zip(&pivots) {
            let c = w[p].clone();
            if !c.is_zero() {
                add_scaled(&mut w, &(-c), row);
            }
        }
        free.iter().map(|&c| w[c].clone()).collect()
    };
    let q = free.len();
    let mut constants = Vec::new();
    for (x, &i) in free.iter().enumerate() {
        for (y, &j) in free.iter().enumerate() {
            for (z, v) in project(&a.bracket_basis(i, j)).into_iter().enumerate() {
                if !v.is_zero() {
                    constants.push((x, y, z, v));
                }
            }
        }
    }
    let names: Vec<String> = free.iter().map(|&c| a.names()[c].clone()).collect();
    let quotient = FiniteLieAlgebra::new(FiniteLeibnizAlgebra::new(names, constants)?)?;
    let cols: Vec<Vec<F>> = (0..n).map(|j| project(&unit(n, j))).collect();
    let matrix = Matrix::from_columns(&cols, q);
    let projection = LinearMap::new(a.clone(), quotient.as_leibniz().clone(), matrix)?;
    Ok((quotient, projection))
}

/// The bracket `[η, η'] = μ(η')·η` on a module with an equivariant map
/// `μ: h → g` satisfying `μ(ξ·η) = [μ(η), ξ]`.
pub fn leibniz_from_equivariant<F: Field + Display>(
    h: &GModule<F>,
    mu: &Matrix<F>,
) -> Result<FiniteLeibnizAlgebra<F>, LeibnizError> {
    let (n, m) = (h.algebra().dim(), h.dim());
    if mu.rows() != n || mu.cols() != m {
        return Err(LeibnizError::Shape {
            rows: n,
            cols: m,
            found_rows: mu.rows(),
            found_cols: mu.cols(),
        });
    }
    let mu_of = |v: &[F]| mu.mul_vec(v);
    let mu_basis = |j: usize| mu_of(&unit(m, j));
    for i in 0..n {
        for j in 0..m {
            let lhs = mu_of(&h.act_basis(i, j));
            let rhs = h.algebra().bracket(&mu_basis(j), &unit(n, i));
            let r = sub_vec(&lhs, &rhs);
            if !is_zero_vec(&r) {
                return Err(LeibnizError::Precondition(
                    BasisWitness {
                        indices: vec![i, j],
                        residual: r,
                    }
                    .to_string(),
                ));
            }
        }
    }
    let mut constants = Vec::new();
    for a in 0..m {
        for b in 0..m {
            for (k, v) in h.act(&mu_basis(b), &unit(m, a)).into_iter().enumerate() {
                if !v.is_zero() {
                    constants.push((a, b, k, v));
                }
            }
        }
    }
    let alg = FiniteLeibnizAlgebra::new(h.names().to_vec(), constants)?;
    if let Verdict::Fails(w) = alg.check_leibniz() {
        return Err(LeibnizError::NotLeibniz(w.to_string()));
    }
    Ok(alg)
}

/// `g ⊕ h` with `[(ξ,η), (ξ',η')] = ([ξ,ξ'], ξ·η')` and the projection to `g`.
pub fn hemisemidirect<F: Field + Display>(g: &FiniteLieAlgebra<F>, h: &GModule<F>) -> CourantAlgebraSpec<F> {
    let (n, m) = (g.dim(), h.dim());
    let mut constants = g.as_leibniz().constants();
    for i in 0..n {
        for j in 0..m {
            for (k, v) in h.act_basis(i, j).into_iter().enumerate() {
                if !v.is_zero() {
                    constants.push((i, n + j, n + k, v));
                }
            }
        }
    }
    let names: Vec<String> = g.names().iter().chain(h.names()).cloned().collect();
    let a = FiniteLeibnizAlgebra::new(names, constants).expect("indices in range");
    let cols: Vec<Vec<F>> = (0..n + m)
        .map(|j| if j < n { unit(n, j) } else { vec![F::zero(); n] })
        .collect();
    let pi = LinearMap::new(a.clone(), g.as_leibniz().clone(), Matrix::from_columns(&cols, n)).expect("shape");
    CourantAlgebraSpec { a, g: g.clone(), pi }
}

impl<F: Field + Display> CourantAlgebraSpec<F> {
    pub fn new(a: FiniteLeibnizAlgebra<F>, g: FiniteLieAlgebra<F>, pi: Matrix<F>) -> Result<Self, LeibnizError> {
        let pi = LinearMap::new(a.clone(), g.as_leibniz().clone(), pi)?;
        Ok(CourantAlgebraSpec { a, g, pi })
    }

    pub fn is_surjective(&self) -> bool {
        self.pi.rank() == self.g.dim()
    }

    /// A basis of `ker π`.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        self.pi.kernel()
    }

    pub fn check_abelian_kernel(&self) -> Verdict<BasisWitness<F>> {
        let k = self.kernel();
        for (x, u) in k.iter().enumerate() {
            for (y, v) in k.iter().enumerate() {
                let b = self.a.bracket(u, v);
                if !is_zero_vec(&b) {
                    return Verdict::Fails(BasisWitness {
                        indices: vec![x, y],
                        residual: b,
                    });
                }
            }
        }
        Verdict::Holds
    }

    pub fn is_exact(&self) -> bool {
        self.is_surjective() && self.check_abelian_kernel().holds()
    }

    /// A preimage `a` with `π(a) = e_i`.
    pub fn lift(&self, i: usize) -> Option<Vec<F>> {
        self.pi.matrix().solve(&unit(self.g.dim(), i))
    }
}

/// Leibniz identity of `a`, morphism property of `π`, surjectivity and an
/// abelian kernel.
pub fn check_courant_algebra<F: Field + Display>(ca: &CourantAlgebraSpec<F>) -> Report {
    let mut r = Report::new("courant algebra");
    r.verdict("leibniz", &ca.a.check_leibniz(), |w| w.to_string());
    r.verdict("morphism", &check_morphism(&ca.pi), |w| w.to_string());
    let rank = ca.pi.rank();
    if rank == ca.g.dim() {
        r.pass("surjective");
    } else {
        r.fail("surjective", format!("rank of pi is {rank} < {}", ca.g.dim()));
    }
    r.verdict("abelian-kernel", &ca.check_abelian_kernel(), |w| {
        format!("kernel vectors {w}")
    });
    r
}

/// The action `ξ·η = [a, η]` of `g` on `ker π` for any lift `π(a) = ξ`,
/// written in the kernel basis returned by [`CourantAlgebraSpec::kernel`].
pub fn induced_module_action<F: Field + Display>(ca: &CourantAlgebraSpec<F>) -> Result<GModule<F>, LeibnizError> {
    if !ca.is_surjective() {
        return Err(LeibnizError::NotExact("pi is not surjective".into()));
    }
    if let Verdict::Fails(w) = ca.check_abelian_kernel() {
        return Err(LeibnizError::NotExact(format!("kernel bracket nonzero at {w}")));
    }
    let k = ca.kernel();
    let m = k.len();
    let dim_a = ca.a.dim();
    let kmat = Matrix::from_columns(&k, dim_a);
    let coords = |v: &[F]| kmat.solve(v);
    let mut action = Vec::new();
    for i in 0..ca.g.dim() {
        let lift = ca.lift(i).expect("surjective");
        for (b, kb) in k.iter().enumerate() {
            let image = ca.a.bracket(&lift, kb);
            let c = coords(&image)
                .ok_or_else(|| LeibnizError::NotExact(format!("[lift of {i}, kernel {b}] leaves the kernel")))?;
            // another lift differs by a kernel vector
            for (x, kx) in k.iter().enumerate() {
                let mut other = lift.clone();
                add_scaled(&mut other, &F::one(), kx);
                let r = sub_vec(&ca.a.bracket(&other, kb), &image);
                if !is_zero_vec(&r) {
                    return Err(LeibnizError::IllDefinedAction(
                        BasisWitness {
                            indices: vec![i, b, x],
                            residual: r,
                        }
                        .to_string(),
                    ));
                }
            }
            for (c_idx, v) in c.into_iter().enumerate() {
                if !v.is_zero() {
                    action.push((i, b, c_idx, v));
                }
            }
        }
    }
    let names: Vec<String> = (1..=m).map(|i| format!("k{i}")).collect();
    GModule::new(ca.g.clone(), names, action)
}

/// A basis pair `(ξ_i, η_j)` where `υ(ξ_i·η_j) ≠ L_{ψ(ξ_i)} υ(η_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivarianceWitness {
    pub xi: usize,
    pub eta: usize,
    pub lhs: String,
    pub rhs: String,
}

/// Checks `υ(ξ·η) = L_{ψ(ξ)} υ(η)` on all basis pairs.
pub fn check_equivariant<T: LieTransport>(
    h: &GModule<Rational>,
    patch: &Patch,
    psi: &[VectorField],
    v: &[T],
) -> Result<Verdict<EquivarianceWitness>, LeibnizError> {
    if psi.len() != h.algebra().dim() || v.len() != h.dim() {
        return Err(LeibnizError::Dimension(format!(
            "{} fields for a {}-dimensional algebra, {} images for a {}-dimensional module",
            psi.len(),
            h.algebra().dim(),
            v.len(),
            h.dim()
        )));
    }
    for (i, x) in psi.iter().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            let lhs = h
                .act_basis(i, j)
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .fold(vj.scaled(&ScalarField::zero()), |acc, (k, c)| {
                    acc.plus(&v[k].scaled(&ScalarField::constant(c.clone())))
                });
            let rhs = vj.lie_derivative_along(x);
            if lhs != rhs {
                return Ok(Verdict::Fails(EquivarianceWitness {
                    xi: i,
                    eta: j,
                    lhs: lhs.render(patch),
                    rhs: rhs.render(patch),
                }));
            }
        }
    }
    Ok(Verdict::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_scalar, parse_vector_field};

    type Q = Rational;

    fn q(v: i64) -> Q {
        Q::from_integer(v.into())
    }

    fn sl2() -> FiniteLieAlgebra<Q> {
        FiniteLieAlgebra::sl2()
    }

    #[test]
    fn sl2_is_lie_and_leibniz() {
        let g = sl2();
        assert!(g.as_leibniz().check_leibniz().holds());
        assert_eq!(g.bracket_basis(0, 1), vec![q(0), q(0), q(1)]);
        assert_eq!(g.bracket_basis(2, 0), vec![q(2), q(0), q(0)]);
        assert!(FiniteLeibnizAlgebra::<Q>::abelian(4).check_leibniz().holds());
    }

    #[test]
    fn perturbed_sl2_fails() {
        let mut c = sl2().as_leibniz().constants();
        c[0].3 = q(2);
        let a = FiniteLeibnizAlgebra::new(["e", "f", "h"], c).unwrap();
        let w = a.check_leibniz();
        assert!(w.witness().is_some());
        assert!(FiniteLieAlgebra::new(a).is_err());
    }

    #[test]
    fn morphism_examples() {
        let g = sl2();
        assert!(check_morphism(&LinearMap::identity(g.as_leibniz())).holds());
        assert!(check_morphism(&LinearMap::zero(g.as_leibniz(), g.as_leibniz())).holds());
        let mut m = Matrix::zeros(3, 3);
        m.set(0, 0, q(1));
        let f = LinearMap::new(g.as_leibniz().clone(), g.as_leibniz().clone(), m).unwrap();
        assert!(!check_morphism(&f).holds());
    }

    #[test]
    fn hemisemidirect_sl2_adjoint() {
        let g = sl2();
        let ca = hemisemidirect(&g, &GModule::adjoint(&g));
        assert_eq!(ca.a.dim(), 6);
        assert!(ca.a.check_leibniz().holds());
        assert!(!ca.a.check_antisymmetry().holds());
        // [(ξ,η),(ξ',η')] = ([ξ,ξ'], [ξ,η'])
        assert_eq!(ca.a.bracket_basis(0, 4), vec![q(0), q(0), q(0), q(0), q(0), q(1)]);
        assert!(ca.a.bracket_basis(4, 0).iter().all(|x| *x == q(0)));
        assert!(check_courant_algebra(&ca).passed());
        let (quot, proj) = squares_ideal_quotient(&ca.a).unwrap();
        assert_eq!(quot.dim(), 3);
        assert!(check_morphism(&proj).holds());
        assert!(quot.as_leibniz().check_jacobi().holds());
    }

    #[test]
    fn quotient_of_lie_algebra_is_itself() {
        let g = sl2();
        let (quot, proj) = squares_ideal_quotient(g.as_leibniz()).unwrap();
        assert_eq!(&quot, &g);
        assert_eq!(proj, LinearMap::identity(g.as_leibniz()));
        let ab = FiniteLieAlgebra::<Q>::abelian(2);
        let ca = hemisemidirect(&ab, &GModule::trivial(&ab, 2));
        assert!(ca.a.constants().is_empty());
        assert_eq!(squares_ideal_quotient(&ca.a).unwrap().0.dim(), 4);
    }

    #[test]
    fn leibniz_from_equivariant_cases() {
        let g = sl2();
        let adj = GModule::adjoint(&g);
        let zero = Matrix::zeros(3, 3);
        let ab = leibniz_from_equivariant(&adj, &zero).unwrap();
        assert!(ab.constants().is_empty());
        let mut minus_id = Matrix::zeros(3, 3);
        for i in 0..3 {
            minus_id.set(i, i, q(-1));
        }
        assert!(matches!(
            leibniz_from_equivariant(&adj, &minus_id),
            Err(LeibnizError::Precondition(_))
        ));
        // 1-dim g acting nilpotently on a plane, μ = e2*
        let line = FiniteLieAlgebra::<Q>::abelian(1);
        let nil = GModule::new(line.clone(), ["u", "v"], [(0, 1, 0, q(1))]).unwrap();
        let mut mu = Matrix::zeros(1, 2);
        mu.set(0, 1, q(1));
        let alg = leibniz_from_equivariant(&nil, &mu).unwrap();
        assert!(alg.check_leibniz().holds());
        let mu_map = LinearMap::new(alg.clone(), line.as_leibniz().clone(), mu.clone()).unwrap();
        assert!(check_morphism(&mu_map).holds());
        // diagonal action: precondition holds but the bracket is not left Leibniz
        let diag = GModule::new(line, ["u", "v"], [(0, 0, 0, q(1))]).unwrap();
        assert!(matches!(
            leibniz_from_equivariant(&diag, &mu),
            Err(LeibnizError::NotLeibniz(_))
        ));
    }

    #[test]
    fn courant_algebra_negative_cases() {
        let g = sl2();
        let ca = hemisemidirect(&g, &GModule::adjoint(&g));
        let zero_pi = CourantAlgebraSpec::new(ca.a.clone(), g.clone(), Matrix::zeros(3, 6)).unwrap();
        let r = check_courant_algebra(&zero_pi);
        assert!(!r.item("surjective").unwrap().passed);
        // a = g ⊕ g with the direct-sum bracket: kernel 0 ⊕ g is not abelian
        let mut c = g.as_leibniz().constants();
        c.extend(
            g.as_leibniz()
                .constants()
                .into_iter()
                .map(|(i, j, k, v)| (i + 3, j + 3, k + 3, v)),
        );
        let a = FiniteLeibnizAlgebra::new(["e", "f", "h", "e'", "f'", "h'"], c).unwrap();
        let bad = CourantAlgebraSpec::new(a, g.clone(), ca.pi.matrix().clone()).unwrap();
        let r = check_courant_algebra(&bad);
        assert!(r.item("morphism").unwrap().passed);
        assert!(!r.item("abelian-kernel").unwrap().passed);
        assert!(matches!(induced_module_action(&bad), Err(LeibnizError::NotExact(_))));
    }

    #[test]
    fn induced_action_recovers_module() {
        let g = sl2();
        let adj = GModule::adjoint(&g);
        let ca = hemisemidirect(&g, &adj);
        let induced = induced_module_action(&ca).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(induced.act_basis(i, j), adj.act_basis(i, j));
            }
        }
        let ab = FiniteLieAlgebra::<Q>::abelian(2);
        let trivial = induced_module_action(&hemisemidirect(&ab, &GModule::trivial(&ab, 3))).unwrap();
        assert!((0..2).all(|i| (0..3).all(|j| trivial.act_basis(i, j).iter().all(|x| *x == q(0)))));
    }

    #[test]
    fn equivariance_examples() {
        let p = Patch::new(["x1", "y1", "x2", "y2"]).unwrap();
        let line = FiniteLieAlgebra::<Q>::abelian(1);
        let triv = GModule::trivial(&line, 1);
        let psi = vec![parse_vector_field(&p, "@y1").unwrap()];
        let zero = vec![ScalarField::zero()];
        assert!(check_equivariant(&triv, &p, &psi, &zero).unwrap().holds());
        let mu = vec![parse_scalar(&p, "-(x1 + x1^3/3)").unwrap()];
        assert!(check_equivariant(&triv, &p, &psi, &mu).unwrap().holds());
        let bad = vec![parse_scalar(&p, "y1").unwrap()];
        let w = check_equivariant(&triv, &p, &psi, &bad).unwrap();
        assert_eq!(w.witness().unwrap().rhs, "1");
    }
}
