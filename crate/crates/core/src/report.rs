//! Verdicts with witnesses and itemized check reports.

use std::fmt;

/// Outcome of a single identity check: it holds, or fails with a witness.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict<W> {
    Holds,
    Fails(W),
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(w) => Some(w),
        }
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Verdict<V> {
        match self {
            Verdict::Holds => Verdict::Holds,
            Verdict::Fails(w) => Verdict::Fails(f(w)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    /// Pretty-printed counterexample; always present on failure.
    pub witness: Option<String>,
    pub detail: Option<String>,
}

/// A titled list of check items plus notes on the generic locus.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub title: String,
    pub items: Vec<CheckItem>,
    /// Functions whose zero sets bound the validity of generic verdicts.
    pub locus: Vec<String>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn pass(&mut self, name: impl Into<String>) -> &mut CheckItem {
        self.push(name, true, None)
    }

    pub fn fail(&mut self, name: impl Into<String>, witness: impl Into<String>) -> &mut CheckItem {
        self.push(name, false, Some(witness.into()))
    }

    /// Records a verdict, rendering the witness on failure.
    pub fn verdict<W>(
        &mut self,
        name: impl Into<String>,
        v: &Verdict<W>,
        show: impl FnOnce(&W) -> String,
    ) -> &mut CheckItem {
        match v {
            Verdict::Holds => self.pass(name),
            Verdict::Fails(w) => self.fail(name, show(w)),
        }
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, witness: Option<String>) -> &mut CheckItem {
        self.items.push(CheckItem {
            name: name.into(),
            passed,
            witness,
            detail: None,
        });
        self.items.last_mut().expect("just pushed")
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn add_locus(&mut self, f: String) {
        if !self.locus.contains(&f) {
            self.locus.push(f);
        }
    }

    /// Appends the items of `other`, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut item in other.items {
            item.name = format!("{prefix}{}", item.name);
            self.items.push(item);
        }
        for l in other.locus {
            self.add_locus(l);
        }
        self.notes.extend(other.notes);
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn item(&self, name: &str) -> Option<&CheckItem> {
        self.items.iter().find(|i| i.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.items.iter().filter(|i| !i.passed)
    }
}

impl CheckItem {
    pub fn with_detail(&mut self, detail: impl Into<String>) -> &mut Self {
        self.detail = Some(detail.into());
        self
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.title, if self.passed() { "PASS" } else { "FAIL" })?;
        for item in &self.items {
            write!(f, "  [{}] {}", if item.passed { "pass" } else { "FAIL" }, item.name)?;
            if let Some(d) = &item.detail {
                write!(f, " ({d})")?;
            }
            writeln!(f)?;
            if let Some(w) = &item.witness {
                writeln!(f, "        witness: {w}")?;
            }
        }
        if !self.locus.is_empty() {
            writeln!(f, "  generic away from zeros of: {}", self.locus.join(", "))?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}
