//! Scenario files: a JSON document declaring a patch, named symbolic
//! objects and a list of checks with expected outcomes.
//!
//! Symbolic payloads are strings in the expression grammar. A string that
//! starts with `$` refers to a named object of the expected kind.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use twisted_dirac::actions::{
    build_twisted_extension, diagonal_extension, symplectic_extension, ExtendedAction, InfinitesimalAction, MomentMap,
};
use twisted_dirac::leibniz::{hemisemidirect, CourantAlgebraSpec};
use twisted_dirac::{
    parse_form, parse_scalar, parse_vector_field, DifferentialForm, DiracStructure, FiniteLeibnizAlgebra,
    FiniteLieAlgebra, GModule, GeneralizedSection, Matrix, ParseError, Patch, Rational, ScalarField, Twist,
    VectorField,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: at byte {offset}: {source}")]
    Json {
        path: String,
        offset: usize,
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: unknown {kind} `{name}`")]
    Unknown {
        path: String,
        kind: &'static str,
        name: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: &str, message: impl ToString) -> ScenarioError {
    ScenarioError::Invalid {
        path: path.to_string(),
        message: message.to_string(),
    }
}

/// A structure constant or matrix entry: an integer or a rational string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coef {
    Int(i64),
    Text(String),
}

impl Coef {
    fn value(&self, path: &str) -> Result<Rational, ScenarioError> {
        match self {
            Coef::Int(v) => Ok(Rational::from_integer((*v).into())),
            Coef::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| invalid(path, format!("`{s}` is not a rational number"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionSpec {
    pub vector: String,
    pub form: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SectionRef {
    Name(String),
    Inline(SectionSpec),
}

/// A closed 3-form given literally or as the exterior derivative of a
/// 2-form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TwistSpec {
    Form(String),
    Derivative { d: String },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bivector: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub cotangent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<SectionRef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<TwistSpec>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraKind {
    #[default]
    Lie,
    Leibniz,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub basis: Vec<String>,
    /// Nonzero constants `[i, j, k, c]`: `[e_i, e_j]` has `c` along `e_k`.
    #[serde(default)]
    pub brackets: Vec<(usize, usize, usize, Coef)>,
    #[serde(default)]
    pub kind: AlgebraKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub algebra: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub adjoint: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trivial: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    /// Nonzero coefficients `[i, j, k, c]`: `ξ_i · η_j` has `c` along `η_k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Vec<(usize, usize, usize, Coef)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HemisemidirectSpec {
    pub algebra: String,
    pub module: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CourantSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hemisemidirect: Option<HemisemidirectSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lie: Option<String>,
    /// Rows indexed by the Lie algebra basis, columns by the Leibniz basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<Vec<Vec<Coef>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RhoSpec {
    Constructor(String),
    Sections(Vec<SectionRef>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub algebra: String,
    pub psi: Vec<String>,
    /// `"diagonal"`, `"symplectic"`, `"twisted"` or explicit sections.
    pub rho: RhoSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_eq: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub courant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<TwistSpec>,
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracExpect {
    #[serde(default = "yes")]
    pub isotropic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default = "yes")]
    pub involutive: bool,
}

impl Default for DiracExpect {
    fn default() -> Self {
        DiracExpect {
            isotropic: true,
            rank: None,
            involutive: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeibnizExpect {
    #[serde(default = "yes")]
    pub leibniz: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antisymmetric: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jacobi: Option<bool>,
}

impl Default for LeibnizExpect {
    fn default() -> Self {
        LeibnizExpect {
            leibniz: true,
            antisymmetric: None,
            jacobi: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CourantExpect {
    #[serde(default = "yes")]
    pub valid: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotient_dim: Option<usize>,
}

impl Default for CourantExpect {
    fn default() -> Self {
        CourantExpect {
            valid: true,
            quotient_dim: None,
        }
    }
}

/// Check kinds as written in scenario files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CheckKind {
    Dirac {
        structure: String,
        #[serde(default)]
        expect: DiracExpect,
    },
    Bracket {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        twist: Option<TwistSpec>,
        left: SectionRef,
        right: SectionRef,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        courant: bool,
        expect: SectionSpec,
    },
    AdmissiblePair {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        twist: Option<TwistSpec>,
        section: SectionRef,
        #[serde(default = "yes", skip_serializing_if = "is_true")]
        expect: bool,
    },
    Admissible {
        structure: String,
        functions: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<Vec<bool>>,
    },
    Poisson {
        structure: String,
        functions: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table: Option<Vec<Vec<String>>>,
    },
    Jacobiator {
        structure: String,
        triples: Vec<[String; 3]>,
        expect: Vec<String>,
    },
    Leibniz {
        algebra: String,
        #[serde(default)]
        expect: LeibnizExpect,
    },
    CourantAlgebra {
        courant: String,
        #[serde(default)]
        expect: CourantExpect,
    },
    Extension {
        action: String,
        #[serde(default = "yes", skip_serializing_if = "is_true")]
        expect: bool,
    },
    DiracAction {
        action: String,
        structure: String,
        #[serde(default = "yes", skip_serializing_if = "is_true")]
        expect: bool,
    },
    Lemma {
        action: String,
        #[serde(default = "yes", skip_serializing_if = "is_true")]
        expect: bool,
    },
    MomentMap {
        action: String,
        moment_map: String,
        #[serde(default = "yes", skip_serializing_if = "is_true")]
        expect: bool,
    },
    Compatible {
        action: String,
        moment_map: String,
        #[serde(default = "yes", skip_serializing_if = "is_true")]
        expect: bool,
    },
    PiMu {
        action: String,
        moment_map: String,
        structure: String,
        #[serde(default = "yes", skip_serializing_if = "is_true")]
        expect: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table: Option<Vec<Vec<String>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        constants_of_motion: Option<bool>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: CheckKind,
}

/// A scenario file as written.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub patch: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub scalars: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub forms: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fields: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sections: BTreeMap<String, SectionSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub structures: BTreeMap<String, StructureSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub algebras: BTreeMap<String, AlgebraSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, ModuleSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub courant_algebras: BTreeMap<String, CourantSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub actions: BTreeMap<String, ActionSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub moment_maps: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| {
            let offset = byte_offset(text, e.line(), e.column());
            ScenarioError::Json {
                path: "scenario".into(),
                offset,
                source: e,
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// Converts a 1-based line and column into a byte offset.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(text.len())
}

/// A finite algebra, with its Lie structure when declared as one.
#[derive(Clone, Debug, PartialEq)]
pub struct Algebra {
    pub leibniz: FiniteLeibnizAlgebra<Rational>,
    pub lie: Option<FiniteLieAlgebra<Rational>>,
}

/// Resolved check parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Check {
    Dirac {
        structure: DiracStructure,
        expect: DiracExpect,
    },
    Bracket {
        twist: Twist,
        left: GeneralizedSection,
        right: GeneralizedSection,
        courant: bool,
        expect: GeneralizedSection,
    },
    AdmissiblePair {
        twist: Twist,
        section: GeneralizedSection,
        expect: bool,
    },
    Admissible {
        structure: DiracStructure,
        functions: Vec<ScalarField>,
        expect: Option<Vec<bool>>,
    },
    Poisson {
        structure: DiracStructure,
        functions: Vec<ScalarField>,
        table: Option<Vec<Vec<ScalarField>>>,
    },
    Jacobiator {
        structure: DiracStructure,
        triples: Vec<[ScalarField; 3]>,
        expect: Vec<ScalarField>,
    },
    Leibniz {
        algebra: FiniteLeibnizAlgebra<Rational>,
        expect: LeibnizExpect,
    },
    CourantAlgebra {
        ca: CourantAlgebraSpec<Rational>,
        expect: CourantExpect,
    },
    Extension {
        action: ExtendedAction,
        expect: bool,
    },
    DiracAction {
        action: ExtendedAction,
        structure: DiracStructure,
        expect: bool,
    },
    Lemma {
        action: ExtendedAction,
        expect: bool,
    },
    MomentMap {
        action: ExtendedAction,
        moment_map: MomentMap,
        expect: bool,
    },
    Compatible {
        action: ExtendedAction,
        moment_map: MomentMap,
        expect: bool,
    },
    PiMu {
        action: ExtendedAction,
        moment_map: MomentMap,
        structure: DiracStructure,
        expect: bool,
        table: Option<Vec<Vec<ScalarField>>>,
        constants_of_motion: Option<bool>,
    },
}

impl Check {
    pub fn kind(&self) -> &'static str {
        match self {
            Check::Dirac { .. } => "dirac",
            Check::Bracket { .. } => "bracket",
            Check::AdmissiblePair { .. } => "admissible-pair",
            Check::Admissible { .. } => "admissible",
            Check::Poisson { .. } => "poisson",
            Check::Jacobiator { .. } => "jacobiator",
            Check::Leibniz { .. } => "leibniz",
            Check::CourantAlgebra { .. } => "courant-algebra",
            Check::Extension { .. } => "extension",
            Check::DiracAction { .. } => "dirac-action",
            Check::Lemma { .. } => "lemma",
            Check::MomentMap { .. } => "moment-map",
            Check::Compatible { .. } => "compatible",
            Check::PiMu { .. } => "pi-mu",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedCheck {
    pub name: String,
    pub check: Check,
}

/// A scenario with every name resolved and every object type-checked.
#[derive(Clone, Debug, PartialEq)]
pub struct World {
    pub name: String,
    pub patch: Patch,
    pub scalars: BTreeMap<String, ScalarField>,
    pub forms: BTreeMap<String, DifferentialForm>,
    pub fields: BTreeMap<String, VectorField>,
    pub sections: BTreeMap<String, GeneralizedSection>,
    pub structures: BTreeMap<String, DiracStructure>,
    pub algebras: BTreeMap<String, Algebra>,
    pub modules: BTreeMap<String, GModule<Rational>>,
    pub courant_algebras: BTreeMap<String, CourantAlgebraSpec<Rational>>,
    pub actions: BTreeMap<String, ExtendedAction>,
    pub moment_maps: BTreeMap<String, MomentMap>,
    pub checks: Vec<NamedCheck>,
}

fn lookup<'a, T>(
    map: &'a BTreeMap<String, T>,
    path: &str,
    kind: &'static str,
    name: &str,
) -> Result<&'a T, ScenarioError> {
    let key = name.strip_prefix('$').unwrap_or(name);
    map.get(key).ok_or_else(|| ScenarioError::Unknown {
        path: path.into(),
        kind,
        name: key.into(),
    })
}

impl World {
    fn empty(name: &str, patch: Patch) -> Self {
        World {
            name: name.into(),
            patch,
            scalars: BTreeMap::new(),
            forms: BTreeMap::new(),
            fields: BTreeMap::new(),
            sections: BTreeMap::new(),
            structures: BTreeMap::new(),
            algebras: BTreeMap::new(),
            modules: BTreeMap::new(),
            courant_algebras: BTreeMap::new(),
            actions: BTreeMap::new(),
            moment_maps: BTreeMap::new(),
            checks: Vec::new(),
        }
    }

    pub fn scalar(&self, path: &str, text: &str) -> Result<ScalarField, ScenarioError> {
        if text.starts_with('$') {
            return lookup(&self.scalars, path, "scalar", text).cloned();
        }
        parse_scalar(&self.patch, text).map_err(|e| ScenarioError::Parse {
            path: path.into(),
            source: e,
        })
    }

    pub fn form(&self, path: &str, text: &str, degree: Option<usize>) -> Result<DifferentialForm, ScenarioError> {
        let f = if text.starts_with('$') {
            lookup(&self.forms, path, "form", text)?.clone()
        } else {
            parse_form(&self.patch, text, degree).map_err(|e| ScenarioError::Parse {
                path: path.into(),
                source: e,
            })?
        };
        match degree {
            Some(k) if f.degree() != k => Err(invalid(
                path,
                format!("expected a {k}-form, found degree {}", f.degree()),
            )),
            _ => Ok(f),
        }
    }

    pub fn field(&self, path: &str, text: &str) -> Result<VectorField, ScenarioError> {
        if text.starts_with('$') {
            return lookup(&self.fields, path, "vector field", text).cloned();
        }
        parse_vector_field(&self.patch, text).map_err(|e| ScenarioError::Parse {
            path: path.into(),
            source: e,
        })
    }

    fn section_spec(&self, path: &str, s: &SectionSpec) -> Result<GeneralizedSection, ScenarioError> {
        let x = self.field(&format!("{path}.vector"), &s.vector)?;
        let a = self.form(&format!("{path}.form"), &s.form, Some(1))?;
        GeneralizedSection::new(x, a).map_err(|e| invalid(path, e))
    }

    fn section(&self, path: &str, s: &SectionRef) -> Result<GeneralizedSection, ScenarioError> {
        match s {
            SectionRef::Name(n) => lookup(&self.sections, path, "section", n).cloned(),
            SectionRef::Inline(spec) => self.section_spec(path, spec),
        }
    }

    fn twist(&self, path: &str, t: Option<&TwistSpec>) -> Result<Twist, ScenarioError> {
        let form = match t {
            None => return Ok(Twist::zero(&self.patch, 1)),
            Some(TwistSpec::Form(s)) => self.form(path, s, Some(3))?,
            Some(TwistSpec::Derivative { d }) => self.form(&format!("{path}.d"), d, Some(2))?.exterior_derivative(),
        };
        Twist::new(form).map_err(|e| invalid(path, e))
    }

    fn structure(&self, path: &str, name: &str) -> Result<DiracStructure, ScenarioError> {
        lookup(&self.structures, path, "structure", name).cloned()
    }

    fn action(&self, path: &str, name: &str) -> Result<ExtendedAction, ScenarioError> {
        lookup(&self.actions, path, "action", name).cloned()
    }

    fn moment_map(&self, path: &str, name: &str) -> Result<MomentMap, ScenarioError> {
        lookup(&self.moment_maps, path, "moment map", name).cloned()
    }

    fn lie(&self, path: &str, name: &str) -> Result<FiniteLieAlgebra<Rational>, ScenarioError> {
        lookup(&self.algebras, path, "algebra", name)?
            .lie
            .clone()
            .ok_or_else(|| invalid(path, format!("algebra `{name}` is not declared as a Lie algebra")))
    }

    fn scalars_list(&self, path: &str, items: &[String]) -> Result<Vec<ScalarField>, ScenarioError> {
        items
            .iter()
            .enumerate()
            .map(|(i, s)| self.scalar(&format!("{path}[{i}]"), s))
            .collect()
    }

    fn table(&self, path: &str, rows: &[Vec<String>]) -> Result<Vec<Vec<ScalarField>>, ScenarioError> {
        rows.iter()
            .enumerate()
            .map(|(i, r)| self.scalars_list(&format!("{path}[{i}]"), r))
            .collect()
    }

    fn load_structure(&self, path: &str, spec: &StructureSpec) -> Result<DiracStructure, ScenarioError> {
        let twist = self.twist(&format!("{path}.twist"), spec.twist.as_ref())?;
        let given = [
            spec.graph.is_some(),
            spec.bivector.is_some(),
            spec.cotangent,
            spec.generators.is_some(),
        ];
        if given.iter().filter(|&&b| b).count() != 1 {
            return Err(invalid(
                path,
                "give exactly one of graph, bivector, cotangent, generators",
            ));
        }
        let d = if let Some(h) = &spec.graph {
            let h = self.form(&format!("{path}.graph"), h, Some(2))?;
            DiracStructure::graph_of_two_form(&h, twist)
        } else if let Some(rows) = &spec.bivector {
            let p = self.table(&format!("{path}.bivector"), rows)?;
            DiracStructure::graph_of_bivector(&self.patch, &p, Some(twist))
        } else if spec.cotangent {
            DiracStructure::cotangent(&self.patch, twist)
        } else {
            let gens = spec.generators.as_ref().expect("checked above");
            let sections = gens
                .iter()
                .enumerate()
                .map(|(i, s)| self.section(&format!("{path}.generators[{i}]"), s))
                .collect::<Result<Vec<_>, _>>()?;
            DiracStructure::new(twist, sections)
        };
        d.map_err(|e| invalid(path, e))
    }

    fn load_algebra(path: &str, spec: &AlgebraSpec) -> Result<Algebra, ScenarioError> {
        let constants = spec
            .brackets
            .iter()
            .enumerate()
            .map(|(i, (a, b, c, v))| Ok((*a, *b, *c, v.value(&format!("{path}.brackets[{i}]"))?)))
            .collect::<Result<Vec<_>, ScenarioError>>()?;
        let leibniz = FiniteLeibnizAlgebra::new(spec.basis.clone(), constants).map_err(|e| invalid(path, e))?;
        let lie = match spec.kind {
            AlgebraKind::Lie => Some(FiniteLieAlgebra::new(leibniz.clone()).map_err(|e| invalid(path, e))?),
            AlgebraKind::Leibniz => None,
        };
        Ok(Algebra { leibniz, lie })
    }

    fn load_module(&self, path: &str, spec: &ModuleSpec) -> Result<GModule<Rational>, ScenarioError> {
        let g = self.lie(&format!("{path}.algebra"), &spec.algebra)?;
        let given = [spec.adjoint, spec.trivial.is_some(), spec.action.is_some()];
        if given.iter().filter(|&&b| b).count() != 1 {
            return Err(invalid(path, "give exactly one of adjoint, trivial, action"));
        }
        if spec.adjoint {
            return Ok(GModule::adjoint(&g));
        }
        if let Some(m) = spec.trivial {
            return Ok(GModule::trivial(&g, m));
        }
        let basis = spec
            .basis
            .clone()
            .ok_or_else(|| invalid(path, "an explicit action needs a basis"))?;
        let action = spec
            .action
            .as_ref()
            .expect("checked above")
            .iter()
            .enumerate()
            .map(|(i, (a, b, c, v))| Ok((*a, *b, *c, v.value(&format!("{path}.action[{i}]"))?)))
            .collect::<Result<Vec<_>, ScenarioError>>()?;
        GModule::new(g, basis, action).map_err(|e| invalid(path, e))
    }

    fn load_courant(&self, path: &str, spec: &CourantSpec) -> Result<CourantAlgebraSpec<Rational>, ScenarioError> {
        if let Some(h) = &spec.hemisemidirect {
            let g = self.lie(&format!("{path}.hemisemidirect.algebra"), &h.algebra)?;
            let m = lookup(
                &self.modules,
                &format!("{path}.hemisemidirect.module"),
                "module",
                &h.module,
            )?;
            if m.algebra() != &g {
                return Err(invalid(path, "module is over a different algebra"));
            }
            return Ok(hemisemidirect(&g, m));
        }
        let (Some(a), Some(g), Some(pi)) = (&spec.algebra, &spec.lie, &spec.pi) else {
            return Err(invalid(path, "give hemisemidirect, or algebra + lie + pi"));
        };
        let a = lookup(&self.algebras, &format!("{path}.algebra"), "algebra", a)?
            .leibniz
            .clone();
        let g = self.lie(&format!("{path}.lie"), g)?;
        let rows = pi
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .map(|(c, v)| v.value(&format!("{path}.pi[{r}][{c}]")))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let cols = a.dim();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(invalid(path, format!("pi rows must have {cols} entries")));
        }
        CourantAlgebraSpec::new(a, g, Matrix::from_rows(rows, cols)).map_err(|e| invalid(path, e))
    }

    fn load_action(&self, path: &str, spec: &ActionSpec) -> Result<ExtendedAction, ScenarioError> {
        let g = self.lie(&format!("{path}.algebra"), &spec.algebra)?;
        let fields = spec
            .psi
            .iter()
            .enumerate()
            .map(|(i, s)| self.field(&format!("{path}.psi[{i}]"), s))
            .collect::<Result<Vec<_>, _>>()?;
        let psi = InfinitesimalAction::new(g, fields).map_err(|e| invalid(&format!("{path}.psi"), e))?;
        let need = |key: &str, v: &Option<String>| {
            v.clone()
                .ok_or_else(|| invalid(path, format!("this constructor needs `{key}`")))
        };
        let result = match &spec.rho {
            RhoSpec::Constructor(c) => match c.as_str() {
                "diagonal" => {
                    let h = self.form(&format!("{path}.h"), &need("h", &spec.h)?, Some(2))?;
                    diagonal_extension(&psi, &h)
                }
                "symplectic" => {
                    let omega = self.form(&format!("{path}.omega"), &need("omega", &spec.omega)?, Some(2))?;
                    symplectic_extension(&psi, &omega)
                }
                "twisted" => {
                    let h = self.form(&format!("{path}.h"), &need("h", &spec.h)?, Some(2))?;
                    let m = lookup(
                        &self.modules,
                        &format!("{path}.module"),
                        "module",
                        &need("module", &spec.module)?,
                    )?;
                    let mu = self.scalars_list(&format!("{path}.mu_eq"), spec.mu_eq.as_deref().unwrap_or_default())?;
                    build_twisted_extension(&psi, &h, m, &mu)
                }
                other => {
                    return Err(invalid(
                        &format!("{path}.rho"),
                        format!("unknown constructor `{other}`"),
                    ))
                }
            },
            RhoSpec::Sections(list) => {
                let ca = lookup(
                    &self.courant_algebras,
                    &format!("{path}.courant"),
                    "Courant algebra",
                    &need("courant", &spec.courant)?,
                )?;
                let rho = list
                    .iter()
                    .enumerate()
                    .map(|(i, s)| self.section(&format!("{path}.rho[{i}]"), s))
                    .collect::<Result<Vec<_>, _>>()?;
                let twist = self.twist(&format!("{path}.twist"), spec.twist.as_ref())?;
                ExtendedAction::new(ca.clone(), psi, rho, twist)
            }
        };
        result.map_err(|e| invalid(path, e))
    }

    fn load_check(&self, path: &str, spec: &CheckKind) -> Result<Check, ScenarioError> {
        let p = |k: &str| format!("{path}.{k}");
        Ok(match spec {
            CheckKind::Dirac { structure, expect } => Check::Dirac {
                structure: self.structure(&p("structure"), structure)?,
                expect: expect.clone(),
            },
            CheckKind::Bracket {
                twist,
                left,
                right,
                courant,
                expect,
            } => Check::Bracket {
                twist: self.twist(&p("twist"), twist.as_ref())?,
                left: self.section(&p("left"), left)?,
                right: self.section(&p("right"), right)?,
                courant: *courant,
                expect: self.section_spec(&p("expect"), expect)?,
            },
            CheckKind::AdmissiblePair { twist, section, expect } => Check::AdmissiblePair {
                twist: self.twist(&p("twist"), twist.as_ref())?,
                section: self.section(&p("section"), section)?,
                expect: *expect,
            },
            CheckKind::Admissible {
                structure,
                functions,
                expect,
            } => {
                if let Some(e) = expect {
                    if e.len() != functions.len() {
                        return Err(invalid(path, "expect must have one entry per function"));
                    }
                }
                Check::Admissible {
                    structure: self.structure(&p("structure"), structure)?,
                    functions: self.scalars_list(&p("functions"), functions)?,
                    expect: expect.clone(),
                }
            }
            CheckKind::Poisson {
                structure,
                functions,
                table,
            } => {
                let functions = self.scalars_list(&p("functions"), functions)?;
                let table = table.as_ref().map(|t| self.table(&p("table"), t)).transpose()?;
                if let Some(t) = &table {
                    if t.len() != functions.len() || t.iter().any(|r| r.len() != functions.len()) {
                        return Err(invalid(path, "table must be square with one row per function"));
                    }
                }
                Check::Poisson {
                    structure: self.structure(&p("structure"), structure)?,
                    functions,
                    table,
                }
            }
            CheckKind::Jacobiator {
                structure,
                triples,
                expect,
            } => {
                if triples.len() != expect.len() {
                    return Err(invalid(path, "expect must have one entry per triple"));
                }
                let triples = triples
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        let v = self.scalars_list(&format!("{path}.triples[{i}]"), t)?;
                        Ok([v[0].clone(), v[1].clone(), v[2].clone()])
                    })
                    .collect::<Result<Vec<_>, ScenarioError>>()?;
                Check::Jacobiator {
                    structure: self.structure(&p("structure"), structure)?,
                    triples,
                    expect: self.scalars_list(&p("expect"), expect)?,
                }
            }
            CheckKind::Leibniz { algebra, expect } => {
                let a = match (
                    self.algebras.get(algebra.trim_start_matches('$')),
                    self.courant_algebras.get(algebra.trim_start_matches('$')),
                ) {
                    (Some(a), _) => a.leibniz.clone(),
                    (None, Some(ca)) => ca.a.clone(),
                    (None, None) => {
                        return Err(ScenarioError::Unknown {
                            path: p("algebra"),
                            kind: "algebra",
                            name: algebra.clone(),
                        })
                    }
                };
                Check::Leibniz {
                    algebra: a,
                    expect: expect.clone(),
                }
            }
            CheckKind::CourantAlgebra { courant, expect } => Check::CourantAlgebra {
                ca: lookup(&self.courant_algebras, &p("courant"), "Courant algebra", courant)?.clone(),
                expect: expect.clone(),
            },
            CheckKind::Extension { action, expect } => Check::Extension {
                action: self.action(&p("action"), action)?,
                expect: *expect,
            },
            CheckKind::DiracAction {
                action,
                structure,
                expect,
            } => Check::DiracAction {
                action: self.action(&p("action"), action)?,
                structure: self.structure(&p("structure"), structure)?,
                expect: *expect,
            },
            CheckKind::Lemma { action, expect } => Check::Lemma {
                action: self.action(&p("action"), action)?,
                expect: *expect,
            },
            CheckKind::MomentMap {
                action,
                moment_map,
                expect,
            } => Check::MomentMap {
                action: self.action(&p("action"), action)?,
                moment_map: self.moment_map(&p("moment_map"), moment_map)?,
                expect: *expect,
            },
            CheckKind::Compatible {
                action,
                moment_map,
                expect,
            } => Check::Compatible {
                action: self.action(&p("action"), action)?,
                moment_map: self.moment_map(&p("moment_map"), moment_map)?,
                expect: *expect,
            },
            CheckKind::PiMu {
                action,
                moment_map,
                structure,
                expect,
                table,
                constants_of_motion,
            } => Check::PiMu {
                action: self.action(&p("action"), action)?,
                moment_map: self.moment_map(&p("moment_map"), moment_map)?,
                structure: self.structure(&p("structure"), structure)?,
                expect: *expect,
                table: table.as_ref().map(|t| self.table(&p("table"), t)).transpose()?,
                constants_of_motion: *constants_of_motion,
            },
        })
    }

    /// Resolves every declaration in dependency order: scalars, forms,
    /// fields, sections, structures, algebras, modules, Courant algebras,
    /// actions, moment maps, checks.
    pub fn load(s: &Scenario) -> Result<World, ScenarioError> {
        let patch = Patch::new(s.patch.iter().cloned()).map_err(|e| invalid("patch", e))?;
        let mut w = World::empty(&s.name, patch);
        for (k, v) in &s.scalars {
            let f = w.scalar(&format!("scalars.{k}"), v)?;
            w.scalars.insert(k.clone(), f);
        }
        for (k, v) in &s.forms {
            let f = w.form(&format!("forms.{k}"), v, None)?;
            w.forms.insert(k.clone(), f);
        }
        for (k, v) in &s.fields {
            let f = w.field(&format!("fields.{k}"), v)?;
            w.fields.insert(k.clone(), f);
        }
        for (k, v) in &s.sections {
            let f = w.section_spec(&format!("sections.{k}"), v)?;
            w.sections.insert(k.clone(), f);
        }
        for (k, v) in &s.structures {
            let d = w.load_structure(&format!("structures.{k}"), v)?;
            w.structures.insert(k.clone(), d);
        }
        for (k, v) in &s.algebras {
            let a = Self::load_algebra(&format!("algebras.{k}"), v)?;
            w.algebras.insert(k.clone(), a);
        }
        for (k, v) in &s.modules {
            let m = w.load_module(&format!("modules.{k}"), v)?;
            w.modules.insert(k.clone(), m);
        }
        for (k, v) in &s.courant_algebras {
            let c = w.load_courant(&format!("courant_algebras.{k}"), v)?;
            w.courant_algebras.insert(k.clone(), c);
        }
        for (k, v) in &s.actions {
            let a = w.load_action(&format!("actions.{k}"), v)?;
            w.actions.insert(k.clone(), a);
        }
        for (k, v) in &s.moment_maps {
            let m = w.scalars_list(&format!("moment_maps.{k}"), v)?;
            w.moment_maps.insert(k.clone(), MomentMap::new(m));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, c) in s.checks.iter().enumerate() {
            let path = format!("checks[{i}] ({})", c.name);
            if !seen.insert(c.name.clone()) {
                return Err(invalid(&path, "duplicate check name"));
            }
            let check = w.load_check(&path, &c.kind)?;
            w.checks.push(NamedCheck {
                name: c.name.clone(),
                check,
            });
        }
        Ok(w)
    }
}

/// Parses and resolves a scenario document.
pub fn load_str(text: &str) -> Result<(Scenario, World), ScenarioError> {
    let s = Scenario::from_json(text)?;
    let w = World::load(&s)?;
    Ok((s, w))
}

/// The scenario with every symbolic literal replaced by the canonical
/// printing of the object it denotes. References are kept.
pub fn canonicalize(s: &Scenario) -> Result<Scenario, ScenarioError> {
    let w = World::load(s)?;
    let mut out = s.clone();
    let names = w.patch.names().to_vec();
    let scalar = |path: &str, t: &str| -> Result<String, ScenarioError> {
        if t.starts_with('$') {
            return Ok(t.to_string());
        }
        Ok(w.scalar(path, t)?.to_string_with(&names))
    };
    let form = |path: &str, t: &str, k: Option<usize>| -> Result<String, ScenarioError> {
        if t.starts_with('$') {
            return Ok(t.to_string());
        }
        Ok(w.form(path, t, k)?.to_string())
    };
    let field = |path: &str, t: &str| -> Result<String, ScenarioError> {
        if t.starts_with('$') {
            return Ok(t.to_string());
        }
        Ok(w.field(path, t)?.to_string())
    };
    let section = |path: &str, s: &mut SectionSpec| -> Result<(), ScenarioError> {
        s.vector = field(path, &s.vector)?;
        s.form = form(path, &s.form, Some(1))?;
        Ok(())
    };
    let section_ref = |path: &str, s: &mut SectionRef| -> Result<(), ScenarioError> {
        if let SectionRef::Inline(spec) = s {
            section(path, spec)?;
        }
        Ok(())
    };
    let twist = |path: &str, t: &mut Option<TwistSpec>| -> Result<(), ScenarioError> {
        match t {
            Some(TwistSpec::Form(f)) => *f = form(path, f, Some(3))?,
            Some(TwistSpec::Derivative { d }) => *d = form(path, d, Some(2))?,
            None => {}
        }
        Ok(())
    };
    let scalars = |path: &str, v: &mut Vec<String>| -> Result<(), ScenarioError> {
        for s in v.iter_mut() {
            *s = scalar(path, s)?;
        }
        Ok(())
    };
    for v in out.scalars.values_mut() {
        *v = scalar("scalars", v)?;
    }
    for v in out.forms.values_mut() {
        *v = form("forms", v, None)?;
    }
    for v in out.fields.values_mut() {
        *v = field("fields", v)?;
    }
    for v in out.sections.values_mut() {
        section("sections", v)?;
    }
    for st in out.structures.values_mut() {
        if let Some(h) = &mut st.graph {
            *h = form("graph", h, Some(2))?;
        }
        if let Some(rows) = &mut st.bivector {
            for r in rows.iter_mut() {
                scalars("bivector", r)?;
            }
        }
        if let Some(g) = &mut st.generators {
            for s in g.iter_mut() {
                section_ref("generators", s)?;
            }
        }
        twist("twist", &mut st.twist)?;
    }
    for a in out.actions.values_mut() {
        for f in a.psi.iter_mut() {
            *f = field("psi", f)?;
        }
        if let RhoSpec::Sections(list) = &mut a.rho {
            for s in list.iter_mut() {
                section_ref("rho", s)?;
            }
        }
        if let Some(h) = &mut a.h {
            *h = form("h", h, Some(2))?;
        }
        if let Some(h) = &mut a.omega {
            *h = form("omega", h, Some(2))?;
        }
        if let Some(m) = &mut a.mu_eq {
            scalars("mu_eq", m)?;
        }
        twist("twist", &mut a.twist)?;
    }
    for m in out.moment_maps.values_mut() {
        scalars("moment_maps", m)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "name": "small",
        "patch": ["x", "y"],
        "forms": {"omega": "dx^dy"},
        "structures": {"L": {"graph": "$omega"}},
        "checks": [
            {"name": "graph", "kind": "dirac", "structure": "$L", "expect": {"rank": 2}}
        ]
    }"#;

    #[test]
    fn loads_and_resolves_references() {
        let (_, w) = load_str(SMALL).unwrap();
        assert_eq!(w.forms["omega"].to_string(), "dx^dy");
        assert_eq!(w.checks.len(), 1);
        assert_eq!(w.checks[0].check.kind(), "dirac");
    }

    #[test]
    fn parse_errors_carry_path_and_offset() {
        let bad = SMALL.replace("dx^dy", "dx^^dy");
        let err = load_str(&bad).unwrap_err().to_string();
        assert!(err.starts_with("forms.omega: at byte 3"), "{err}");
    }

    #[test]
    fn unknown_references_are_reported() {
        let bad = SMALL.replace("\"$L\"", "\"$M\"");
        let err = load_str(&bad).unwrap_err();
        assert!(matches!(err, ScenarioError::Unknown { kind: "structure", .. }), "{err}");
    }

    #[test]
    fn malformed_json_is_a_json_error() {
        let err = load_str("{\n  \"name\": ,\n}").unwrap_err();
        assert!(matches!(err, ScenarioError::Json { offset: 12, .. }), "{err}");
    }

    #[test]
    fn canonical_form_reloads_identically() {
        let (s, w) = load_str(&SMALL.replace("dx^dy", "2*dx^dy/2")).unwrap();
        let c = canonicalize(&s).unwrap();
        assert_eq!(c.forms["omega"], "dx^dy");
        assert_eq!(World::load(&c).unwrap(), w);
    }
}
