//! Running resolved checks and comparing observations with expectations.

use std::time::Instant;

use serde::Serialize;

use twisted_dirac::actions::{
    check_compatible, check_dirac_action, check_extension, check_lemma_equivariance, check_moment_map, pi_mu,
};
use twisted_dirac::courant::{courant_bracket, dorfman, is_admissible_pair};
use twisted_dirac::leibniz::{check_courant_algebra, squares_ideal_quotient};
use twisted_dirac::poisson::{
    admissible_bracket_identity, is_h_admissible_with_locus, jacobiator, verify_poisson_algebra,
};
use twisted_dirac::{DiracStructure, Patch, Report, ScalarField, Verdict};

use crate::scenario::{Check, NamedCheck};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Item {
    pub name: String,
    pub passed: bool,
    pub witness: Option<String>,
    pub detail: Option<String>,
}

/// The result of one check. A failure always carries a witness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub name: String,
    pub kind: String,
    pub status: Status,
    pub expected: String,
    pub observed: String,
    pub witness: Option<String>,
    pub items: Vec<Item>,
    /// Rows of pretty-printed entries for bracket tables.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<String>>>,
    pub locus: Vec<String>,
    pub notes: Vec<String>,
    pub elapsed_ms: u64,
}

impl Outcome {
    pub fn new(name: &str, kind: &str) -> Self {
        Outcome {
            name: name.into(),
            kind: kind.into(),
            status: Status::Pass,
            expected: String::new(),
            observed: String::new(),
            witness: None,
            items: Vec::new(),
            table: None,
            locus: Vec::new(),
            notes: Vec::new(),
            elapsed_ms: 0,
        }
    }

    pub fn error(name: &str, kind: &str, message: impl ToString) -> Self {
        let mut o = Outcome::new(name, kind);
        o.status = Status::Error;
        o.witness = Some(message.to_string());
        o
    }

    pub fn item(&mut self, name: impl Into<String>, passed: bool, witness: Option<String>, detail: Option<String>) {
        self.items.push(Item {
            name: name.into(),
            passed,
            witness,
            detail,
        });
    }

    /// Copies report items as diagnostics, prefixing their names.
    fn absorb(&mut self, prefix: &str, r: Report) {
        for i in r.items {
            self.item(format!("{prefix}{}", i.name), i.passed, i.witness, i.detail);
        }
        for l in r.locus {
            if !self.locus.contains(&l) {
                self.locus.push(l);
            }
        }
        self.notes.extend(r.notes);
    }

    /// Sets the status from an expectation and fills in a witness on
    /// failure.
    fn settle(&mut self, matches: bool) {
        if self.status == Status::Error {
            return;
        }
        self.status = if matches { Status::Pass } else { Status::Fail };
        if !matches && self.witness.is_none() {
            self.witness = self
                .items
                .iter()
                .find(|i| !i.passed)
                .and_then(|i| i.witness.clone())
                .or_else(|| Some(format!("expected {}, observed {}", self.expected, self.observed)));
        }
    }

    /// Pass iff every item passed.
    fn settle_items(&mut self) {
        let ok = self.items.iter().all(|i| i.passed);
        self.settle(ok);
    }

    fn first_failure(&self) -> Option<String> {
        self.items.iter().find(|i| !i.passed).and_then(|i| i.witness.clone())
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn list(items: impl IntoIterator<Item = String>) -> String {
    format!("[{}]", items.into_iter().collect::<Vec<_>>().join(", "))
}

fn boolean_report(o: &mut Outcome, expect: bool, r: Report) {
    let observed = r.passed();
    o.expected = yes_no(expect).into();
    o.observed = yes_no(observed).into();
    let witness = r.failures().next().and_then(|i| i.witness.clone());
    o.absorb("", r);
    if observed != expect {
        o.witness = Some(witness.unwrap_or_else(|| "every item holds".into()));
    }
    o.settle(observed == expect);
}

fn show(patch: &Patch, f: &ScalarField) -> String {
    patch.show(f).to_string()
}

fn table_strings(patch: &Patch, t: &[Vec<ScalarField>]) -> Vec<Vec<String>> {
    t.iter().map(|r| r.iter().map(|v| show(patch, v)).collect()).collect()
}

fn compare_table(o: &mut Outcome, patch: &Patch, observed: &[Vec<ScalarField>], expected: &[Vec<ScalarField>]) {
    for (i, (ro, re)) in observed.iter().zip(expected).enumerate() {
        for (j, (vo, ve)) in ro.iter().zip(re).enumerate() {
            let ok = vo == ve;
            let w = (!ok).then(|| format!("expected {}, observed {}", show(patch, ve), show(patch, vo)));
            o.item(format!("table[{i},{j}]"), ok, w, None);
        }
    }
}

fn poisson(o: &mut Outcome, d: &DiracStructure, functions: &[ScalarField], table: Option<&Vec<Vec<ScalarField>>>) {
    let patch = d.patch();
    let mut admissible = Vec::new();
    for (i, f) in functions.iter().enumerate() {
        match is_h_admissible_with_locus(d, f) {
            Some((a, locus)) => {
                for l in locus {
                    let l = show(patch, &l);
                    if !o.locus.contains(&l) {
                        o.locus.push(l);
                    }
                }
                admissible.push(a);
            }
            None => o.item(
                format!("admissible[{i}]"),
                false,
                Some(format!("{} is not H-admissible", show(patch, f))),
                None,
            ),
        }
    }
    if admissible.len() != functions.len() {
        o.expected = "a Poisson algebra".into();
        o.observed = "inadmissible input".into();
        o.settle_items();
        return;
    }
    let observed: Vec<Vec<ScalarField>> = admissible
        .iter()
        .map(|f| admissible.iter().map(|g| f.bracket(g)).collect())
        .collect();
    o.absorb("", verify_poisson_algebra(d, &admissible));
    for (i, f) in admissible.iter().enumerate() {
        for (j, g) in admissible.iter().enumerate().skip(i + 1) {
            o.absorb(
                &format!("bracket-identity[{i},{j}]/"),
                admissible_bracket_identity(d, f, g),
            );
        }
    }
    if let Some(t) = table {
        compare_table(o, patch, &observed, t);
        o.expected = format!(
            "table {}",
            list(t.iter().map(|r| list(r.iter().map(|v| show(patch, v)))))
        );
    } else {
        o.expected = "a Poisson algebra".into();
    }
    o.observed = format!(
        "table {}",
        list(observed.iter().map(|r| list(r.iter().map(|v| show(patch, v)))))
    );
    o.table = Some(table_strings(patch, &observed));
    o.settle_items();
}

fn evaluate(o: &mut Outcome, check: &Check) {
    match check {
        Check::Dirac { structure, expect } => {
            let r = structure.validate();
            let iso = r.item("isotropic").is_some_and(|i| i.passed);
            let inv = r.item("involutive").is_some_and(|i| i.passed);
            let rank = structure.generic_rank().rank;
            let describe = |iso: bool, rank: Option<usize>, inv: bool| {
                let mut s = format!("isotropic {}, ", yes_no(iso));
                if let Some(k) = rank {
                    s.push_str(&format!("rank {k}, "));
                }
                s.push_str(&format!("involutive {}", yes_no(inv)));
                s
            };
            o.expected = describe(expect.isotropic, expect.rank, expect.involutive);
            o.observed = describe(iso, Some(rank), inv);
            let witness = r.failures().next().and_then(|i| i.witness.clone());
            o.absorb("", r);
            let ok = iso == expect.isotropic && inv == expect.involutive && expect.rank.is_none_or(|k| k == rank);
            if !ok {
                o.witness = Some(witness.unwrap_or_else(|| format!("observed {}", o.observed)));
            }
            o.settle(ok);
        }
        Check::Bracket {
            twist,
            left,
            right,
            courant,
            expect,
        } => {
            let r = if *courant {
                courant_bracket(twist, left, right)
            } else {
                dorfman(twist, left, right)
            };
            match r {
                Ok(b) => {
                    o.expected = expect.to_string();
                    o.observed = b.to_string();
                    if &b != expect {
                        o.witness = Some(format!("difference {}", &b - expect));
                    }
                    o.settle(&b == expect);
                }
                Err(e) => *o = Outcome::error(&o.name, &o.kind, e),
            }
        }
        Check::AdmissiblePair { twist, section, expect } => match is_admissible_pair(twist, section) {
            Ok(v) => {
                o.expected = yes_no(*expect).into();
                o.observed = yes_no(v.holds()).into();
                if let Verdict::Fails(w) = &v {
                    o.notes.push(format!("d alpha + i_X H = {w}"));
                    if *expect {
                        o.witness = Some(format!("d alpha + i_X H = {w}"));
                    }
                } else if !*expect {
                    o.witness = Some("d alpha + i_X H = 0".into());
                }
                o.settle(v.holds() == *expect);
            }
            Err(e) => *o = Outcome::error(&o.name, &o.kind, e),
        },
        Check::Admissible {
            structure,
            functions,
            expect,
        } => {
            let patch = structure.patch();
            let mut verdicts = Vec::new();
            for (i, f) in functions.iter().enumerate() {
                let name = format!("{i}: {}", show(patch, f));
                let (ok, detail) = match is_h_admissible_with_locus(structure, f) {
                    Some((a, locus)) => {
                        for l in locus {
                            let l = show(patch, &l);
                            if !o.locus.contains(&l) {
                                o.locus.push(l);
                            }
                        }
                        (true, format!("X = {}", a.field()))
                    }
                    None => (false, "no Hamiltonian field annihilating H".to_string()),
                };
                verdicts.push(ok);
                let passed = expect.as_ref().is_none_or(|e| e[i] == ok);
                let witness =
                    (!passed).then(|| format!("{} is {}admissible", show(patch, f), if ok { "" } else { "not " }));
                o.item(name, passed, witness, Some(detail));
            }
            o.observed = list(verdicts.iter().map(|&b| yes_no(b).to_string()));
            o.expected = match expect {
                Some(e) => list(e.iter().map(|&b| yes_no(b).to_string())),
                None => "verdicts".into(),
            };
            o.settle_items();
        }
        Check::Poisson {
            structure,
            functions,
            table,
        } => poisson(o, structure, functions, table.as_ref()),
        Check::Jacobiator {
            structure,
            triples,
            expect,
        } => {
            let patch = structure.patch();
            let mut observed = Vec::new();
            for (i, ([f, g, h], e)) in triples.iter().zip(expect).enumerate() {
                match jacobiator(structure, f, g, h) {
                    Ok((sum, value)) => {
                        let ok = &sum == e && &value == e;
                        let detail = format!("J = {}, H(X_f,X_g,X_h) = {}", show(patch, &sum), show(patch, &value));
                        let w = (!ok).then(|| format!("expected {}; {detail}", show(patch, e)));
                        o.item(format!("triple[{i}]"), ok, w, Some(detail));
                        observed.push(show(patch, &sum));
                    }
                    Err(err) => {
                        *o = Outcome::error(&o.name, &o.kind, format!("triple[{i}]: {err}"));
                        return;
                    }
                }
            }
            o.expected = list(expect.iter().map(|e| show(patch, e)));
            o.observed = list(observed);
            o.settle_items();
        }
        Check::Leibniz { algebra, expect } => {
            let l = algebra.check_leibniz();
            let a = algebra.check_antisymmetry();
            let j = algebra.check_jacobi();
            let mut r = Report::new("leibniz");
            r.verdict("leibniz", &l, |w| w.to_string());
            r.verdict("antisymmetric", &a, |w| w.to_string());
            r.verdict("jacobi", &j, |w| w.to_string());
            let describe = |l: bool, a: Option<bool>, j: Option<bool>| {
                let mut s = format!("leibniz {}", yes_no(l));
                if let Some(a) = a {
                    s.push_str(&format!(", antisymmetric {}", yes_no(a)));
                }
                if let Some(j) = j {
                    s.push_str(&format!(", jacobi {}", yes_no(j)));
                }
                s
            };
            o.expected = describe(expect.leibniz, expect.antisymmetric, expect.jacobi);
            o.observed = describe(l.holds(), Some(a.holds()), Some(j.holds()));
            let ok = l.holds() == expect.leibniz
                && expect.antisymmetric.is_none_or(|x| x == a.holds())
                && expect.jacobi.is_none_or(|x| x == j.holds());
            o.absorb("", r);
            if !ok {
                o.witness = Some(o.first_failure().unwrap_or_else(|| "every identity holds".into()));
            }
            o.settle(ok);
        }
        Check::CourantAlgebra { ca, expect } => {
            let r = check_courant_algebra(ca);
            let valid = r.passed();
            let quotient = squares_ideal_quotient(&ca.a);
            let qdim = quotient.as_ref().ok().map(|(g, _)| g.dim());
            let describe = |v: bool, q: Option<usize>| match q {
                Some(q) => format!("valid {}, quotient dimension {q}", yes_no(v)),
                None => format!("valid {}", yes_no(v)),
            };
            o.expected = describe(expect.valid, expect.quotient_dim);
            o.observed = describe(valid, qdim);
            o.absorb("", r);
            match &quotient {
                Ok((_, p)) => {
                    let v = twisted_dirac::leibniz::check_morphism(p);
                    o.item(
                        "quotient-projection-morphism",
                        v.holds(),
                        v.witness().map(|w| w.to_string()),
                        None,
                    );
                }
                Err(e) => o.notes.push(format!("squares-ideal quotient: {e}")),
            }
            let ok = valid == expect.valid && expect.quotient_dim.is_none_or(|q| Some(q) == qdim);
            if !ok {
                o.witness = Some(o.first_failure().unwrap_or_else(|| format!("observed {}", o.observed)));
            }
            o.settle(ok);
        }
        Check::Extension { action, expect } => boolean_report(o, *expect, check_extension(action)),
        Check::DiracAction {
            action,
            structure,
            expect,
        } => match check_dirac_action(action, structure) {
            Ok(r) => boolean_report(o, *expect, r),
            Err(e) => *o = Outcome::error(&o.name, &o.kind, e),
        },
        Check::Lemma { action, expect } => boolean_report(o, *expect, check_lemma_equivariance(action)),
        Check::MomentMap {
            action,
            moment_map,
            expect,
        } => match check_moment_map(action, moment_map) {
            Ok(r) => boolean_report(o, *expect, r),
            Err(e) => *o = Outcome::error(&o.name, &o.kind, e),
        },
        Check::Compatible {
            action,
            moment_map,
            expect,
        } => match check_compatible(action, moment_map) {
            Ok(r) => boolean_report(o, *expect, r),
            Err(e) => *o = Outcome::error(&o.name, &o.kind, e),
        },
        Check::PiMu {
            action,
            moment_map,
            structure,
            expect,
            table,
            constants_of_motion,
        } => match pi_mu(action, moment_map, structure) {
            Ok(res) => {
                let patch = action.patch();
                let valid = res.report.passed();
                let mut extra_ok = true;
                o.absorb("", res.report);
                if let Some(t) = table {
                    if res.table.len() == t.len() {
                        compare_table(o, patch, &res.table, t);
                        extra_ok &= o
                            .items
                            .iter()
                            .filter(|i| i.name.starts_with("table["))
                            .all(|i| i.passed);
                    } else {
                        o.item(
                            "table",
                            false,
                            Some("no bracket table: some image is not admissible".into()),
                            None,
                        );
                        extra_ok = false;
                    }
                }
                if let Some(c) = constants_of_motion {
                    let ok = *c == res.constants_of_motion;
                    let w = (!ok).then(|| {
                        format!(
                            "constants of motion: expected {}, observed {}",
                            yes_no(*c),
                            yes_no(res.constants_of_motion)
                        )
                    });
                    o.item("constants-of-motion", ok, w, None);
                    extra_ok &= ok;
                }
                o.expected = yes_no(*expect).into();
                o.observed = format!(
                    "{}; images {}",
                    yes_no(valid),
                    list(res.images.iter().map(|f| show(patch, f)))
                );
                if !res.table.is_empty() {
                    o.table = Some(table_strings(patch, &res.table));
                }
                let ok = valid == *expect && extra_ok;
                if !ok {
                    o.witness = Some(o.first_failure().unwrap_or_else(|| "every item holds".into()));
                }
                o.settle(ok);
            }
            Err(e) => *o = Outcome::error(&o.name, &o.kind, e),
        },
    }
}

/// Runs one check, timing it.
pub fn run_check(c: &NamedCheck) -> Outcome {
    let start = Instant::now();
    let mut o = Outcome::new(&c.name, c.check.kind());
    evaluate(&mut o, &c.check);
    o.elapsed_ms = start.elapsed().as_millis() as u64;
    o
}
