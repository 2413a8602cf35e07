//! Command-line front end: scenario files, check execution, reports, the
//! bundled golden scenarios and the randomized property suite.

pub mod bundled;
pub mod checks;
pub mod mutate;
pub mod output;
pub mod randomized;
pub mod scenario;

use checks::{run_check, Outcome};
use output::ScenarioResult;
use scenario::{NamedCheck, World};

/// Check kinds run by each subcommand; `None` runs every kind.
pub fn kinds_for(subcommand: &str) -> Option<&'static [&'static str]> {
    match subcommand {
        "validate" => Some(&[]),
        "check-dirac" => Some(&["dirac", "bracket", "admissible-pair"]),
        "admissible" => Some(&["admissible"]),
        "poisson-table" => Some(&["poisson", "jacobiator"]),
        "leibniz-check" => Some(&["leibniz", "courant-algebra"]),
        "action-check" => Some(&["extension", "dirac-action", "lemma"]),
        "moment-check" => Some(&["moment-map", "compatible", "pi-mu"]),
        _ => None,
    }
}

/// The checks of `w` selected by kind and by name.
pub fn select<'a>(w: &'a World, kinds: Option<&[&str]>, only: Option<&str>) -> Vec<&'a NamedCheck> {
    w.checks
        .iter()
        .filter(|c| kinds.is_none_or(|k| k.contains(&c.check.kind())))
        .filter(|c| only.is_none_or(|n| c.name == n))
        .collect()
}

/// Runs checks concurrently and reports them sorted by name.
pub fn run_checks(scenario: &str, checks: &[&NamedCheck]) -> ScenarioResult {
    let mut outcomes: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = checks.iter().map(|c| s.spawn(move || run_check(c))).collect();
        handles
            .into_iter()
            .zip(checks)
            .map(|(h, c)| {
                h.join()
                    .unwrap_or_else(|_| Outcome::error(&c.name, c.check.kind(), "internal error: check panicked"))
            })
            .collect()
    });
    outcomes.sort_by(|a, b| a.name.cmp(&b.name));
    ScenarioResult {
        scenario: scenario.into(),
        checks: outcomes,
    }
}

/// Runs every check of a world.
pub fn run_all(w: &World) -> ScenarioResult {
    run_checks(&w.name, &select(w, None, None))
}
