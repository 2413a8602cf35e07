use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use twisted_dirac_cli::output::{self, ScenarioResult, Summary};
use twisted_dirac_cli::randomized::{property_suite, Sizes};
use twisted_dirac_cli::scenario::{canonicalize, load_str, Check, NamedCheck, Scenario, World};
use twisted_dirac_cli::{bundled, kinds_for, run_checks, select};

#[derive(Parser)]
#[command(
    name = "twisted-dirac",
    version,
    about = "Exact checks for twisted Dirac structures, Poisson algebras and Dirac actions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Run only the check with this name.
    #[arg(long, global = true)]
    only: Option<String>,
    /// Seed for the randomized property suite.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Degree bound for random polynomials.
    #[arg(long, default_value_t = 2, global = true)]
    max_degree: u32,
    /// List every item of every check.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Target {
    /// Scenario file, or the name of a bundled scenario.
    scenario: String,
}

#[derive(Args)]
struct AdHoc {
    #[command(flatten)]
    target: Target,
    /// Structure used with --function; defaults to the only one declared.
    #[arg(long)]
    structure: Option<String>,
    /// Function to test instead of the scenario's checks; repeatable.
    #[arg(long = "function")]
    functions: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and type-check a scenario without running checks.
    Validate(Target),
    /// Isotropy, rank and involutivity; bracket and admissible-pair checks.
    CheckDirac(Target),
    /// Admissibility verdicts for listed functions.
    Admissible(AdHoc),
    /// Bracket tables with the Poisson algebra suite; Jacobiator checks.
    PoissonTable(AdHoc),
    /// Leibniz and Courant algebra checks.
    LeibnizCheck(Target),
    /// Extensions of actions, Dirac actions and equivariance.
    ActionCheck(Target),
    /// Moment maps, compatibility and the induced Poisson map.
    MomentCheck(Target),
    /// Every check of a scenario.
    Run(Target),
    /// Print a scenario with every literal in canonical form.
    Print(Target),
    /// List bundled scenarios.
    List,
    /// All bundled scenarios plus the randomized property suite.
    PaperSuite,
}

/// A usage or input error, reported on stderr with exit code 2.
type Failure = String;

fn read_scenario(arg: &str) -> Result<(String, String), Failure> {
    if let Some(text) = bundled::find(arg) {
        if !Path::new(arg).exists() {
            return Ok((arg.to_string(), text.to_string()));
        }
    }
    std::fs::read_to_string(arg)
        .map(|t| (arg.to_string(), t))
        .map_err(|e| format!("cannot read `{arg}`: {e}"))
}

fn load(arg: &str) -> Result<(Scenario, World), Failure> {
    let (source, text) = read_scenario(arg)?;
    load_str(&text).map_err(|e| format!("{source}: {e}"))
}

fn adhoc(w: &World, a: &AdHoc, poisson: bool) -> Result<Option<NamedCheck>, Failure> {
    if a.functions.is_empty() {
        return Ok(None);
    }
    let structure = match &a.structure {
        Some(s) => w
            .structures
            .get(s.trim_start_matches('$'))
            .ok_or_else(|| format!("unknown structure `{s}`"))?,
        None if w.structures.len() == 1 => w.structures.values().next().expect("one structure"),
        None => return Err("--structure is required when several structures are declared".into()),
    };
    let functions = a
        .functions
        .iter()
        .enumerate()
        .map(|(i, f)| w.scalar(&format!("--function[{i}]"), f))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let structure = structure.clone();
    let check = if poisson {
        Check::Poisson {
            structure,
            functions,
            table: None,
        }
    } else {
        Check::Admissible {
            structure,
            functions,
            expect: None,
        }
    };
    Ok(Some(NamedCheck {
        name: "functions".into(),
        check,
    }))
}

fn emit(results: &[ScenarioResult], flags: &Flags) -> ExitCode {
    match flags.format {
        Format::Text => print!("{}", output::text(results, flags.verbose)),
        Format::Json => println!("{}", output::json(results)),
    }
    ExitCode::from(Summary::of(results).exit_code() as u8)
}

fn scenario_checks(w: &World, subcommand: &str, flags: &Flags) -> Result<ScenarioResult, Failure> {
    let checks = select(w, kinds_for(subcommand), flags.only.as_deref());
    if let Some(name) = &flags.only {
        if checks.is_empty() {
            return Err(format!("no {subcommand} check named `{name}` in scenario `{}`", w.name));
        }
    }
    Ok(run_checks(&w.name, &checks))
}

fn paper_suite(flags: &Flags) -> Result<Vec<ScenarioResult>, Failure> {
    let mut results = Vec::new();
    for name in bundled::names() {
        let (_, w) = load(name)?;
        results.push(run_checks(&w.name, &select(&w, None, flags.only.as_deref())));
    }
    results.push(property_suite(
        flags.seed,
        flags.max_degree,
        Sizes::default(),
        flags.only.as_deref(),
    ));
    if let Some(only) = &flags.only {
        if results.iter().all(|r| r.checks.is_empty()) {
            return Err(format!("no check named `{only}`"));
        }
        results.retain(|r| !r.checks.is_empty());
    }
    Ok(results)
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    let flags = &cli.flags;
    let (subcommand, target) = match &cli.command {
        Command::List => {
            for n in bundled::names() {
                println!("{n}");
            }
            return Ok(ExitCode::SUCCESS);
        }
        Command::PaperSuite => return Ok(emit(&paper_suite(flags)?, flags)),
        Command::Print(t) => {
            let (s, _) = load(&t.scenario)?;
            let c = canonicalize(&s).map_err(|e| e.to_string())?;
            println!("{}", c.to_json());
            return Ok(ExitCode::SUCCESS);
        }
        Command::Admissible(a) | Command::PoissonTable(a) => {
            let poisson = matches!(cli.command, Command::PoissonTable(_));
            let (_, w) = load(&a.target.scenario)?;
            if let Some(c) = adhoc(&w, a, poisson)? {
                return Ok(emit(&[run_checks(&w.name, &[&c])], flags));
            }
            (if poisson { "poisson-table" } else { "admissible" }, &a.target)
        }
        Command::Validate(t) => {
            let (_, w) = load(&t.scenario)?;
            if flags.format == Format::Text {
                println!("scenario {}: valid ({} checks)", w.name, w.checks.len());
            } else {
                println!(
                    "{}",
                    serde_json::json!({"scenario": w.name, "valid": true, "checks": w.checks.len()})
                );
            }
            return Ok(ExitCode::SUCCESS);
        }
        Command::CheckDirac(t) => ("check-dirac", t),
        Command::LeibnizCheck(t) => ("leibniz-check", t),
        Command::ActionCheck(t) => ("action-check", t),
        Command::MomentCheck(t) => ("moment-check", t),
        Command::Run(t) => ("run", t),
    };
    let (_, w) = load(&target.scenario)?;
    let result = scenario_checks(&w, subcommand, flags)?;
    Ok(emit(&[result], flags))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
