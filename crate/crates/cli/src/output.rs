//! Human-readable and JSON rendering of check outcomes.

use std::fmt::Write;

use serde::Serialize;

use crate::checks::{Outcome, Status};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub scenario: String,
    pub checks: Vec<Outcome>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

impl Summary {
    pub fn of(results: &[ScenarioResult]) -> Self {
        let mut s = Summary::default();
        for o in results.iter().flat_map(|r| &r.checks) {
            match o.status {
                Status::Pass => s.passed += 1,
                Status::Fail => s.failed += 1,
                Status::Error => s.errors += 1,
            }
        }
        s
    }

    /// 0 when everything passed, 1 on any failure, 2 on any error.
    pub fn exit_code(&self) -> i32 {
        if self.errors > 0 {
            2
        } else if self.failed > 0 {
            1
        } else {
            0
        }
    }
}

#[derive(Serialize)]
struct Document<'a> {
    results: &'a [ScenarioResult],
    summary: Summary,
}

pub fn json(results: &[ScenarioResult]) -> String {
    let doc = Document {
        results,
        summary: Summary::of(results),
    };
    serde_json::to_string_pretty(&doc).expect("report serializes")
}

fn status_tag(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Error => "ERROR",
    }
}

/// Pads every column to its widest entry.
pub fn aligned_table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:>w$}", w = widths[c]))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn text(results: &[ScenarioResult], verbose: bool) -> String {
    let mut out = String::new();
    for r in results {
        writeln!(out, "scenario {}", r.scenario).unwrap();
        for o in &r.checks {
            writeln!(
                out,
                "  [{}] {} ({}) {} ms",
                status_tag(o.status),
                o.name,
                o.kind,
                o.elapsed_ms
            )
            .unwrap();
            if !o.expected.is_empty() {
                writeln!(out, "      expected: {}", o.expected).unwrap();
            }
            if !o.observed.is_empty() {
                writeln!(out, "      observed: {}", o.observed).unwrap();
            }
            if let Some(w) = &o.witness {
                writeln!(out, "      witness: {w}").unwrap();
            }
            if let Some(t) = &o.table {
                for line in aligned_table(t).lines() {
                    writeln!(out, "      | {line}").unwrap();
                }
            }
            let show_items = verbose || o.status != Status::Pass;
            for i in o.items.iter().filter(|i| show_items && (verbose || !i.passed)) {
                write!(out, "      {} {}", if i.passed { "ok  " } else { "FAIL" }, i.name).unwrap();
                if let Some(w) = &i.witness {
                    write!(out, ": {w}").unwrap();
                }
                if let Some(d) = &i.detail {
                    write!(out, " [{d}]").unwrap();
                }
                out.push('\n');
            }
            if !o.locus.is_empty() {
                writeln!(out, "      generic away from zeros of: {}", o.locus.join(", ")).unwrap();
            }
            for n in &o.notes {
                writeln!(out, "      note: {n}").unwrap();
            }
        }
    }
    let s = Summary::of(results);
    writeln!(
        out,
        "summary: {} passed, {} failed, {} errors",
        s.passed, s.failed, s.errors
    )
    .unwrap();
    out
}
