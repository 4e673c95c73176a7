//! `signaling-power`: run scenarios, sweep parameters, verify the PoS bound on
//! random games and export instances.

mod report;
mod sweep;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use signaling_power::game::random::{instance_rng, random_capped_game, SizeCaps};
use signaling_power::game::{game_from_json, game_to_json, Sense};
use signaling_power::routing::{routing_from_json, routing_to_json};
use signaling_power::scenarios::{build, evaluate_instance, Instance, Params, ScenarioId, ScenarioSpec};
use signaling_power::signaling::{verify_pos_bound, BoundReport, PublicOptions, SchemeClass};

use report::{Format, RunReport, Target};

#[derive(Parser)]
#[command(name = "signaling-power", version, about = "Power of signaling and price of anarchy for Bayesian games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute class values, PoS ratios and the worst-state PoA.
    Run(RunArgs),
    /// Evaluate a scenario over a parameter grid and write CSV.
    Sweep(SweepArgs),
    /// Check the PoS bound on seeded random games.
    Verify(VerifyArgs),
    /// Write a scenario's instance in the JSON instance format.
    ExportScenario(ExportArgs),
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
}

impl ParamArgs {
    fn params(self) -> Params {
        Params {
            alpha: self.alpha,
            eps: self.eps,
            n: self.n,
        }
    }
}

#[derive(Args, Clone, Copy)]
struct SolverArgs {
    /// Posterior grid resolution for public schemes.
    #[arg(long, default_value_t = 512)]
    grid: usize,
    /// Always search the posterior grid, even when NI or FI is provably optimal.
    #[arg(long)]
    no_certify: bool,
}

impl SolverArgs {
    fn options(self) -> PublicOptions {
        PublicOptions {
            grid: self.grid,
            certify: !self.no_certify,
        }
    }
}

#[derive(Args, Clone, Copy)]
#[group(multiple = false)]
struct FormatArgs {
    /// JSON output.
    #[arg(long)]
    json: bool,
    /// CSV output.
    #[arg(long)]
    csv: bool,
}

impl FormatArgs {
    fn format(self, default: Format) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            default
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Scenario id: fig1, fig2, fig3, sec51, fig4, fig5 or appA.
    #[arg(required_unless_present = "instance", conflicts_with = "instance")]
    scenario: Option<String>,
    /// Game or routing instance in JSON.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
    /// Comma-separated classes (fi, ni, pub, pri, exp). Defaults to every
    /// class the instance supports.
    #[arg(long, value_delimiter = ',')]
    classes: Option<Vec<SchemeClass>>,
    /// Check the PoS bound; exit code 2 if it is violated.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    format: FormatArgs,
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Print stage timings to standard error.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct SweepArgs {
    scenario: String,
    /// Value or inclusive range `start:end:step`.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long, value_delimiter = ',')]
    classes: Option<Vec<SchemeClass>>,
    #[command(flatten)]
    solver: SolverArgs,
    /// JSON lines instead of CSV.
    #[arg(long)]
    json: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    count: u64,
    /// Largest number of players (1 or 2).
    #[arg(long, default_value_t = 2)]
    players: usize,
    #[arg(long, default_value_t = 2)]
    states: usize,
    #[arg(long, default_value_t = 3)]
    actions: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    json: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    scenario: String,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Failure classes mapped onto the exit-code contract.
enum Outcome {
    Ok,
    BoundViolated,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Sweep(args) => sweep::sweep(args),
        Command::Verify(args) => verify(args),
        Command::ExportScenario(args) => export(args),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::BoundViolated) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn scenario_spec(id: &str, params: Params) -> Result<ScenarioSpec> {
    Ok(ScenarioSpec::new(id.parse::<ScenarioId>()?, params))
}

/// Reads a game or routing instance; routing files are recognized by their `edges` field.
fn load_instance(path: &PathBuf) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if value.get("edges").is_some() {
        Ok(Instance::Routing(routing_from_json(&text)?))
    } else {
        Ok(Instance::Game(game_from_json(&text)?))
    }
}

/// Classes evaluated when none are requested.
fn default_classes(instance: &Instance, scenario: Option<&signaling_power::scenarios::BuiltScenario>) -> Vec<SchemeClass> {
    match (instance, scenario) {
        (_, Some(built)) => SchemeClass::ALL
            .into_iter()
            .filter(|c| built.expected.contains_key(c.as_str()))
            .collect(),
        (Instance::Game(_), None) => SchemeClass::ALL.to_vec(),
        (Instance::Routing(_), None) => vec![
            SchemeClass::FullInformation,
            SchemeClass::NoInformation,
            SchemeClass::Public,
        ],
    }
}

fn run(args: RunArgs) -> Result<Outcome> {
    let start = Instant::now();
    let (target, instance, built) = match (&args.scenario, &args.instance) {
        (Some(id), None) => {
            let spec = scenario_spec(id, args.params.params())?;
            let built = build(&spec)?;
            (Target::Scenario(spec), built.instance.clone(), Some(built))
        }
        (None, Some(path)) => (Target::File(path.display().to_string()), load_instance(path)?, None),
        _ => bail!("give either a scenario id or --instance"),
    };
    let build_time = start.elapsed();

    let mut classes = args.classes.clone().unwrap_or_else(|| default_classes(&instance, built.as_ref()));
    if args.verify {
        let chain: &[SchemeClass] = match instance {
            Instance::Game(_) => &SchemeClass::BOUND_CHAIN,
            Instance::Routing(_) => &[],
        };
        classes.extend_from_slice(chain);
    }
    let spec = match &target {
        Target::Scenario(spec) => Some(spec),
        Target::File(_) => None,
    };
    let start = Instant::now();
    let evaluation = evaluate_instance(&instance, &classes, &args.solver.options(), spec)?;
    let eval_time = start.elapsed();

    let report = RunReport::new(target, built.as_ref(), evaluation, args.verify);
    let format = args.format.format(Format::Human);
    emit(args.output.as_ref(), &report.render(format)?)?;
    if args.timings {
        eprintln!("build {:.3} s, evaluate {:.3} s", build_time.as_secs_f64(), eval_time.as_secs_f64());
    }
    Ok(if report.passes() { Outcome::Ok } else { Outcome::BoundViolated })
}

#[derive(Serialize)]
struct Violation {
    index: u64,
    sense: Sense,
    report: BoundReport,
    instance: Value,
}

#[derive(Serialize)]
struct Failure {
    index: u64,
    message: String,
}

#[derive(Serialize)]
struct VerifySummary {
    seed: u64,
    count: u64,
    players: usize,
    states: usize,
    actions: usize,
    cost_games: u64,
    payoff_games: u64,
    violations: Vec<Violation>,
    errors: Vec<Failure>,
}

fn verify(args: VerifyArgs) -> Result<Outcome> {
    if !(1..=2).contains(&args.players) || args.states < 1 || args.actions < 2 || args.actions > 6 {
        bail!("size caps must satisfy 1 <= players <= 2, states >= 1 and 2 <= actions <= 6");
    }
    let caps = SizeCaps {
        players: args.players,
        states: args.states,
        actions: args.actions,
    };
    let options = args.solver.options();
    let results: Vec<(u64, Sense, Result<BoundReport, String>, Value)> = (0..args.count)
        .into_par_iter()
        .map(|i| {
            let game = random_capped_game(&mut instance_rng(args.seed, i), caps);
            let result = verify_pos_bound(&game, &options).map_err(|e| e.to_string());
            (i, game.sense(), result, game_to_json(&game))
        })
        .collect();
    let mut summary = VerifySummary {
        seed: args.seed,
        count: args.count,
        players: args.players,
        states: args.states,
        actions: args.actions,
        cost_games: 0,
        payoff_games: 0,
        violations: Vec::new(),
        errors: Vec::new(),
    };
    for (index, sense, result, instance) in results {
        match sense {
            Sense::Cost => summary.cost_games += 1,
            Sense::Payoff => summary.payoff_games += 1,
        }
        match result {
            Ok(report) if report.passes => {}
            Ok(report) => summary.violations.push(Violation {
                index,
                sense,
                report,
                instance,
            }),
            Err(message) => summary.errors.push(Failure { index, message }),
        }
    }
    let text = if args.json {
        report::to_json(&summary)?
    } else {
        let mut out = format!(
            "verified {} games (seed {}, {} cost, {} payoff): {} violations, {} errors\n",
            summary.count,
            summary.seed,
            summary.cost_games,
            summary.payoff_games,
            summary.violations.len(),
            summary.errors.len()
        );
        for v in &summary.violations {
            out.push_str(&format!(
                "violation in game {} ({}): {}\n",
                v.index,
                v.sense.as_str(),
                serde_json::to_string(&v.instance)?
            ));
        }
        for e in &summary.errors {
            out.push_str(&format!("error in game {}: {}\n", e.index, e.message));
        }
        out
    };
    emit(args.output.as_ref(), &text)?;
    Ok(if summary.violations.is_empty() {
        Outcome::Ok
    } else {
        Outcome::BoundViolated
    })
}

fn export(args: ExportArgs) -> Result<Outcome> {
    let built = build(&scenario_spec(&args.scenario, args.params.params())?)?;
    let value = match &built.instance {
        Instance::Game(g) => game_to_json(g),
        Instance::Routing(r) => routing_to_json(r),
    };
    emit(args.output.as_ref(), &(serde_json::to_string_pretty(&value)? + "\n"))?;
    Ok(Outcome::Ok)
}
