//! Twisted Dirac structures as finitely generated submodules of sections of
//! `TM ⊕ T*M`: graphs, isotropy, generic rank, membership and involutivity.
//!
//! Rank and membership are computed over the field of rational functions, so
//! verdicts are generic; the non-constant pivots bounding their validity are
//! reported as the locus.

use num_traits::Zero;
use thiserror::Error;

use crate::courant::{dorfman, pairing, CourantError, GeneralizedSection, Twist};
use crate::exterior::{DifferentialForm, VectorField};
use crate::linalg::Matrix;
use crate::report::{Report, Verdict};
use crate::scalar::{Patch, ScalarField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiracError {
    #[error(transparent)]
    Courant(#[from] CourantError),
    #[error("a Dirac structure needs at least one generator")]
    NoGenerators,
    #[error("generator {0} has order {1}; Dirac structures are built from order-1 sections")]
    OrderNotOne(usize, usize),
    #[error("generators and twist live on different patches")]
    PatchMismatch,
    #[error("bivector matrix must be {0}x{0}")]
    Shape(usize),
    #[error("bivector entries ({0},{1}) and ({1},{0}) are not opposite")]
    NotAntisymmetric(usize, usize),
    #[error("the graph of a bivector cannot carry a nonzero twist")]
    TwistedBivector,
    #[error("expected a 2-form, found degree {0}")]
    NotTwoForm(usize),
}

/// A candidate twisted Dirac structure; the axioms are checked on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracStructure {
    twist: Twist,
    generators: Vec<GeneralizedSection>,
}

/// Two generators whose pairing does not vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct IsotropyWitness {
    pub i: usize,
    pub j: usize,
    pub value: ScalarField,
}

/// A generator bracket that leaves the span.
#[derive(Clone, Debug, PartialEq)]
pub struct InvolutivityWitness {
    pub i: usize,
    pub j: usize,
    pub bracket: GeneralizedSection,
    /// First generator `k` with `⟨[e_i, e_j], e_k⟩ ≠ 0`, when one exists.
    pub obstruction: Option<(usize, ScalarField)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenericRank {
    pub rank: usize,
    /// Non-constant pivots; the rank can drop on their zero sets.
    pub locus: Vec<ScalarField>,
}

/// Coordinates of an order-1 section: vector components, then 1-form
/// coefficients.
pub fn section_coordinates(s: &GeneralizedSection) -> Vec<ScalarField> {
    let n = s.patch().dim();
    let mut v: Vec<ScalarField> = s.vector().components().to_vec();
    v.extend((0..n).map(|i| s.form().coefficient(&[i])));
    v
}

/// Inverse of [`section_coordinates`].
pub fn section_from_coordinates(patch: &Patch, v: &[ScalarField]) -> GeneralizedSection {
    let n = patch.dim();
    assert_eq!(v.len(), 2 * n);
    let vector = VectorField::new(patch, v[..n].to_vec()).expect("coordinates of this patch");
    let form = DifferentialForm::from_terms(patch, 1, (0..n).map(|i| (vec![i], v[n + i].clone())))
        .expect("coordinates of this patch");
    GeneralizedSection::new(vector, form).expect("same patch")
}

/// The graph section `(X, i_X h)`.
pub fn graph_section(h: &DifferentialForm, x: &VectorField) -> Result<GeneralizedSection, DiracError> {
    if h.degree() != 2 {
        return Err(DiracError::NotTwoForm(h.degree()));
    }
    let form = h.interior_product(x).map_err(CourantError::from)?;
    Ok(GeneralizedSection::new(x.clone(), form)?)
}

/// Zero sets bounding a generic verdict: the non-constant numerators and
/// denominators of the pivots, made monic and deduplicated.
pub(crate) fn locus_of(pivots: Vec<ScalarField>) -> Vec<ScalarField> {
    let mut out: Vec<ScalarField> = Vec::new();
    for p in pivots {
        for part in [p.numerator(), p.denominator()] {
            if part.is_constant() {
                continue;
            }
            let f = ScalarField::from_polynomial(part.monic());
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
    out
}

impl DiracStructure {
    pub fn new(twist: Twist, generators: Vec<GeneralizedSection>) -> Result<Self, DiracError> {
        if generators.is_empty() {
            return Err(DiracError::NoGenerators);
        }
        if twist.order() != 1 {
            return Err(CourantError::OrderNotOne(twist.order()).into());
        }
        for (k, g) in generators.iter().enumerate() {
            if g.patch() != twist.patch() {
                return Err(DiracError::PatchMismatch);
            }
            if g.order() != 1 {
                return Err(DiracError::OrderNotOne(k, g.order()));
            }
        }
        Ok(DiracStructure { twist, generators })
    }

    /// Generators `(∂_i, i_{∂_i} h)`.
    pub fn graph_of_two_form(h: &DifferentialForm, twist: Twist) -> Result<Self, DiracError> {
        if h.patch() != twist.patch() {
            return Err(DiracError::PatchMismatch);
        }
        let patch = h.patch();
        let gens = (0..patch.dim())
            .map(|i| graph_section(h, &VectorField::coordinate(patch, i)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(twist, gens)
    }

    /// Generators `(p♯(dx_i), dx_i)` with `p♯(dx_i) = Σ_j p_ij ∂_j`. A
    /// nonzero `twist` is rejected.
    pub fn graph_of_bivector(patch: &Patch, p: &[Vec<ScalarField>], twist: Option<Twist>) -> Result<Self, DiracError> {
        let n = patch.dim();
        if p.len() != n || p.iter().any(|r| r.len() != n) {
            return Err(DiracError::Shape(n));
        }
        for (i, row) in p.iter().enumerate() {
            for (j, other) in p.iter().enumerate().skip(i) {
                if row[j] != -&other[i] {
                    return Err(DiracError::NotAntisymmetric(i, j));
                }
            }
        }
        let twist = match twist {
            Some(t) if !t.is_zero() => return Err(DiracError::TwistedBivector),
            Some(t) => t,
            None => Twist::zero(patch, 1),
        };
        let gens = (0..n)
            .map(|i| {
                let x = VectorField::new(patch, p[i].clone()).map_err(CourantError::from)?;
                Ok(GeneralizedSection::new(x, DifferentialForm::differential(patch, i))?)
            })
            .collect::<Result<Vec<_>, DiracError>>()?;
        Self::new(twist, gens)
    }

    /// The cotangent structure `T*M`, generated by `(0, dx_i)`.
    pub fn cotangent(patch: &Patch, twist: Twist) -> Result<Self, DiracError> {
        let gens = (0..patch.dim())
            .map(|i| GeneralizedSection::from_form(DifferentialForm::differential(patch, i)))
            .collect();
        Self::new(twist, gens)
    }

    pub fn patch(&self) -> &Patch {
        self.twist.patch()
    }

    pub fn twist(&self) -> &Twist {
        &self.twist
    }

    pub fn generators(&self) -> &[GeneralizedSection] {
        &self.generators
    }

    /// The `2n × m` matrix whose columns are generator coordinates.
    pub fn coefficient_matrix(&self) -> Matrix<ScalarField> {
        let cols: Vec<Vec<ScalarField>> = self.generators.iter().map(section_coordinates).collect();
        Matrix::from_columns(&cols, 2 * self.patch().dim())
    }

    pub fn check_isotropic(&self) -> Verdict<IsotropyWitness> {
        for i in 0..self.generators.len() {
            for j in i..self.generators.len() {
                let value = pairing(&self.generators[i], &self.generators[j]).expect("validated orders");
                if !value.is_zero() {
                    return Verdict::Fails(IsotropyWitness { i, j, value });
                }
            }
        }
        Verdict::Holds
    }

    pub fn generic_rank(&self) -> GenericRank {
        let r = self.coefficient_matrix().rref();
        GenericRank {
            rank: r.rank(),
            locus: locus_of(r.pivot_values),
        }
    }

    /// Coefficients `c` with `Σ c_i gen_i = s`, if `s` lies in the span.
    pub fn membership(&self, s: &GeneralizedSection) -> Option<Vec<ScalarField>> {
        self.membership_with_locus(s).map(|(c, _)| c)
    }

    pub fn membership_with_locus(&self, s: &GeneralizedSection) -> Option<(Vec<ScalarField>, Vec<ScalarField>)> {
        if s.patch() != self.patch() || s.order() != 1 {
            return None;
        }
        let (c, pivots) = self.coefficient_matrix().solve_with_pivots(&section_coordinates(s))?;
        Some((c, locus_of(pivots)))
    }

    pub fn contains(&self, s: &GeneralizedSection) -> bool {
        self.membership(s).is_some()
    }

    /// Checks `[gen_i, gen_j]_H ∈ span` for all `i ≤ j`.
    pub fn check_involutive(&self) -> Verdict<InvolutivityWitness> {
        let m = self.generators.len();
        let isotropic = self.check_isotropic().holds();
        for i in 0..m {
            for j in 0..m {
                // [e_j, e_i] = -[e_i, e_j] + d(2⟨e_i, e_j⟩), so i ≤ j suffices
                // once isotropy holds; check both orders otherwise
                if j < i && isotropic {
                    continue;
                }
                let bracket = dorfman(&self.twist, &self.generators[i], &self.generators[j]).expect("validated");
                if self.contains(&bracket) {
                    continue;
                }
                let obstruction = self.generators.iter().enumerate().find_map(|(k, g)| {
                    let v = pairing(&bracket, g).expect("validated");
                    (!v.is_zero()).then_some((k, v))
                });
                return Verdict::Fails(InvolutivityWitness {
                    i,
                    j,
                    bracket,
                    obstruction,
                });
            }
        }
        Verdict::Holds
    }

    /// Isotropy, generic maximality and involutivity as one report.
    pub fn validate(&self) -> Report {
        let patch = self.patch();
        let mut report = Report::new("dirac structure");
        report.verdict("isotropic", &self.check_isotropic(), |w| {
            format!("<e{}, e{}> = {}", w.i, w.j, patch.show(&w.value))
        });
        let rank = self.generic_rank();
        let item = if rank.rank == patch.dim() {
            report.pass("maximal")
        } else {
            report.fail(
                "maximal",
                format!("generic rank {} < dimension {}", rank.rank, patch.dim()),
            )
        };
        item.with_detail(format!("rank {}", rank.rank));
        for l in &rank.locus {
            report.add_locus(patch.show(l).to_string());
        }
        report.verdict("involutive", &self.check_involutive(), |w| {
            let mut s = format!("[e{}, e{}] = {} not in span", w.i, w.j, w.bracket);
            if let Some((k, v)) = &w.obstruction {
                s.push_str(&format!("; <[e{}, e{}], e{}> = {}", w.i, w.j, k, patch.show(v)));
            }
            s
        });
        report
    }

    pub fn is_dirac(&self) -> bool {
        self.check_isotropic().holds()
            && self.generic_rank().rank == self.patch().dim()
            && self.check_involutive().holds()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_form, parse_scalar, parse_vector_field};
    use num_traits::One;

    fn f(p: &Patch, s: &str) -> DifferentialForm {
        parse_form(p, s, None).unwrap()
    }

    fn sec(p: &Patch, v: &str, a: &str) -> GeneralizedSection {
        GeneralizedSection::new(parse_vector_field(p, v).unwrap(), parse_form(p, a, Some(1)).unwrap()).unwrap()
    }

    fn r4() -> Patch {
        Patch::new(["x1", "y1", "x2", "y2"]).unwrap()
    }

    fn r4_h(p: &Patch) -> DifferentialForm {
        f(p, "(1+x1^2)*(dx1^dy1 + dx2^dy2)")
    }

    #[test]
    fn planar_graph() {
        let p = Patch::new(["x", "y"]).unwrap();
        let d = DiracStructure::graph_of_two_form(&f(&p, "dx^dy"), Twist::zero(&p, 1)).unwrap();
        assert_eq!(d.generators(), &[sec(&p, "@x", "dy"), sec(&p, "@y", "-dx")]);
        assert!(d.validate().passed());
    }

    #[test]
    fn r4_graph_involutive_only_with_matching_twist() {
        let p = r4();
        let h = r4_h(&p);
        let twisted = DiracStructure::graph_of_two_form(&h, Twist::new(h.exterior_derivative()).unwrap()).unwrap();
        let report = twisted.validate();
        assert!(report.passed(), "{report}");
        assert_eq!(twisted.generic_rank().rank, 4);
        let untwisted = DiracStructure::graph_of_two_form(&h, Twist::zero(&p, 1)).unwrap();
        assert!(untwisted.check_isotropic().holds());
        let w = untwisted.check_involutive();
        assert!(w.witness().unwrap().obstruction.is_some());
    }

    #[test]
    fn r3_graph_with_dh_nonzero() {
        let p = Patch::new(["x", "y", "z"]).unwrap();
        let d = DiracStructure::graph_of_two_form(&f(&p, "z*dx^dy"), Twist::zero(&p, 1)).unwrap();
        let w = d.check_involutive();
        let (_, v) = w.witness().unwrap().obstruction.clone().unwrap();
        // ⟨[e_i, e_j], e_k⟩ = ±½ dh(∂_x, ∂_y, ∂_z)
        let half = parse_scalar(&p, "1/2").unwrap();
        assert!(v == half || v == -&half);
        assert_eq!(d.generic_rank().rank, 3);
    }

    #[test]
    fn bivector_graphs() {
        let p = Patch::new(["x", "y"]).unwrap();
        let s = |t: &str| parse_scalar(&p, t).unwrap();
        let zero = vec![vec![s("0"), s("0")], vec![s("0"), s("0")]];
        let t = DiracStructure::graph_of_bivector(&p, &zero, None).unwrap();
        assert_eq!(t, DiracStructure::cotangent(&p, Twist::zero(&p, 1)).unwrap());
        assert!(t.validate().passed());
        let canonical = vec![vec![s("0"), s("-1")], vec![s("1"), s("0")]];
        assert!(DiracStructure::graph_of_bivector(&p, &canonical, None)
            .unwrap()
            .validate()
            .passed());
        let linear = vec![vec![s("0"), s("x")], vec![s("-x"), s("0")]];
        assert!(DiracStructure::graph_of_bivector(&p, &linear, None)
            .unwrap()
            .check_involutive()
            .holds());
        let bad = vec![vec![s("0"), s("x")], vec![s("x"), s("0")]];
        assert_eq!(
            DiracStructure::graph_of_bivector(&p, &bad, None),
            Err(DiracError::NotAntisymmetric(0, 1))
        );
        let q = Patch::new(["x", "y", "z"]).unwrap();
        let h = Twist::new(f(&q, "dx^dy^dz")).unwrap();
        let z3 = vec![vec![ScalarField::zero(); 3]; 3];
        assert_eq!(
            DiracStructure::graph_of_bivector(&q, &z3, Some(h)),
            Err(DiracError::TwistedBivector)
        );
    }

    #[test]
    fn isotropy_examples() {
        let p = Patch::new(["x", "y"]).unwrap();
        let z = Twist::zero(&p, 1);
        let bad = DiracStructure::new(z.clone(), vec![sec(&p, "@x", "dx")]).unwrap();
        let w = bad.check_isotropic();
        assert_eq!(
            w.witness().unwrap(),
            &IsotropyWitness {
                i: 0,
                j: 0,
                value: ScalarField::one()
            }
        );
        let good = DiracStructure::new(z.clone(), vec![sec(&p, "@x", "dy"), sec(&p, "@y", "-dx")]).unwrap();
        assert!(good.check_isotropic().holds());
        assert_eq!(
            DiracStructure::new(z, vec![sec(&p, "@x", "dy")])
                .unwrap()
                .generic_rank()
                .rank,
            1
        );
    }

    #[test]
    fn rank_examples() {
        for n in 1..=4 {
            let p = Patch::euclidean(n);
            assert_eq!(
                DiracStructure::cotangent(&p, Twist::zero(&p, 1))
                    .unwrap()
                    .generic_rank()
                    .rank,
                n
            );
        }
        let p = r4();
        let d = DiracStructure::graph_of_two_form(&r4_h(&p), Twist::zero(&p, 1)).unwrap();
        assert_eq!(d.generic_rank().rank, 4);
    }

    #[test]
    fn membership_examples() {
        let p = r4();
        let h = r4_h(&p);
        let d = DiracStructure::graph_of_two_form(&h, Twist::new(h.exterior_derivative()).unwrap()).unwrap();
        let s = |t: &str| parse_scalar(&p, t).unwrap();
        let c = d.membership(&d.generators()[2]).unwrap();
        assert_eq!(c, vec![s("0"), s("0"), s("1"), s("0")]);
        let (a, b) = (s("x1*y2 + 1"), s("1/(1+y1^2)"));
        let combo = &d.generators()[0].scale(&a) + &d.generators()[1].scale(&b);
        assert_eq!(d.membership(&combo).unwrap(), vec![a, b, s("0"), s("0")]);
        assert!(d.membership(&sec(&p, "@x1", "0")).is_none());
    }
}
