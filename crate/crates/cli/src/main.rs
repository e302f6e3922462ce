//! Batch front end: validate problem files, compare allocations, negotiate
//! to a good allocation, run the fairness analysis, and drive the oracle.
//!
//! Reports are JSON on stdout; `--pretty` switches to a human rendering.
//! Exit codes: 0 success, 1 validation failure, 2 usage or budget error,
//! 3 oracle discrepancy.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use qualloc::deals::{is_good, to_good};
use qualloc::error::Error;
use qualloc::fairness::{class_mean, dispersion_vector, locally_fair, partition};
use qualloc::io::{load_problem, CompiledProblem};
use qualloc::oracle::{run_check, CheckKind, CheckReport, OracleBudget};
use qualloc::problem::Allocation;
use qualloc::welfare::welfare_compare;

const EXIT_OK: u8 = 0;
const EXIT_INVALID: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DISCREPANCY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qualloc",
    about = "Qualitative resource allocation: welfare comparison, negotiation, fairness",
    version
)]
struct Cli {
    /// Problem file to operate on.
    #[arg(long, global = true, value_name = "PATH")]
    file: Option<PathBuf>,

    /// Render reports for humans instead of emitting JSON.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check preorders, shapes, allocation columns, and lifting positivity.
    Validate,
    /// Compare two named allocations under the dominance-plausible rule.
    Compare {
        /// Name of the left allocation.
        #[arg(long)]
        left: String,
        /// Name of the right allocation.
        #[arg(long)]
        right: String,
    },
    /// Negotiate from a start allocation to a good one.
    Good {
        /// Name of the start allocation.
        #[arg(long, conflicts_with_all = ["uniform_random", "seed"])]
        start: Option<String>,
        /// Start from an allocation drawn uniformly at random.
        #[arg(long, requires = "seed")]
        uniform_random: bool,
        /// Seed for --uniform-random.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compute the locally fair allocation and the dispersion table.
    Fair,
    /// Re-check a theorem by brute-force enumeration.
    Oracle {
        /// Which statement to check.
        #[arg(long, value_enum)]
        check: CheckArg,
        /// Cap on enumerated allocations (and on examined pairs).
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Seed for sampled checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CheckArg {
    GoodOptimal,
    Partition,
    Trace,
    Fairness,
}

impl From<CheckArg> for CheckKind {
    fn from(arg: CheckArg) -> CheckKind {
        match arg {
            CheckArg::GoodOptimal => CheckKind::GoodOptimal,
            CheckArg::Partition => CheckKind::Partition,
            CheckArg::Trace => CheckKind::Trace,
            CheckArg::Fairness => CheckKind::Fairness,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(&cli))
}

fn run(cli: &Cli) -> u8 {
    let command_name = match &cli.command {
        Command::Validate => "validate",
        Command::Compare { .. } => "compare",
        Command::Good { .. } => "good",
        Command::Fair => "fair",
        Command::Oracle { .. } => "oracle",
    };

    let Some(path) = &cli.file else {
        eprintln!("error: --file <PATH> is required");
        return EXIT_USAGE;
    };
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            return emit_failure(
                command_name,
                cli.pretty,
                &format!("cannot read {}: {e}", path.display()),
                EXIT_INVALID,
            )
        }
    };
    let compiled = match load_problem(&text) {
        Ok(compiled) => compiled,
        Err(e) => return emit_error(command_name, cli.pretty, &e),
    };

    match &cli.command {
        Command::Validate => cmd_validate(cli, &compiled),
        Command::Compare { left, right } => cmd_compare(cli, &compiled, left, right),
        Command::Good {
            start,
            uniform_random,
            seed,
        } => cmd_good(cli, &compiled, start.as_deref(), *uniform_random, *seed),
        Command::Fair => cmd_fair(cli, &compiled),
        Command::Oracle {
            check,
            budget,
            seed,
        } => cmd_oracle(cli, &compiled, (*check).into(), *budget, *seed),
    }
}

fn classify(error: &Error) -> u8 {
    match error {
        Error::BudgetExceeded { .. } => EXIT_USAGE,
        _ => EXIT_INVALID,
    }
}

fn emit_error(command: &str, pretty: bool, error: &Error) -> u8 {
    emit_failure(command, pretty, &error.to_string(), classify(error))
}

fn emit_failure(command: &str, pretty: bool, witness: &str, code: u8) -> u8 {
    if pretty {
        println!("{command}: invalid: {witness}");
    } else {
        println!(
            "{}",
            json!({ "command": command, "status": "invalid", "witness": witness })
        );
    }
    code
}

fn resource_names(compiled: &CompiledProblem, set: &BTreeSet<usize>) -> Vec<String> {
    set.iter()
        .map(|&r| compiled.resource_name(r).to_string())
        .collect()
}

fn allocation_value(compiled: &CompiledProblem, f: &Allocation) -> Value {
    let assignment: serde_json::Map<String, Value> = (0..f.resources())
        .map(|r| {
            (
                compiled.resource_name(r).to_string(),
                Value::String(compiled.agent_name(f.holder(r)).to_string()),
            )
        })
        .collect();
    json!({ "matrix": f.to_matrix(), "assignment": assignment })
}

fn assignment_line(compiled: &CompiledProblem, f: &Allocation) -> String {
    (0..f.resources())
        .map(|r| {
            format!(
                "{} -> {}",
                compiled.resource_name(r),
                compiled.agent_name(f.holder(r))
            )
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn cmd_validate(cli: &Cli, compiled: &CompiledProblem) -> u8 {
    // Reaching this point means parsing, shape checks, preorder validation,
    // and the lifting positivity gate all passed.
    if cli.pretty {
        println!(
            "ok: {} agents, {} resources, {} named allocations ({:?} lifting)",
            compiled.problem.agents(),
            compiled.problem.resources(),
            compiled.allocations.len(),
            compiled.problem.lifting().kind(),
        );
    } else {
        println!(
            "{}",
            json!({
                "command": "validate",
                "status": "ok",
                "agents": compiled.problem.agents(),
                "resources": compiled.problem.resources(),
                "allocations": compiled.allocations.keys().collect::<Vec<_>>(),
            })
        );
    }
    EXIT_OK
}

fn cmd_compare(cli: &Cli, compiled: &CompiledProblem, left: &str, right: &str) -> u8 {
    let (f, g) = match (compiled.allocation(left), compiled.allocation(right)) {
        (Ok(f), Ok(g)) => (f, g),
        (Err(e), _) | (_, Err(e)) => return emit_error("compare", cli.pretty, &e),
    };
    let report = welfare_compare(&compiled.problem, f, g);
    let verdict = serde_json::to_value(report.verdict).expect("verdict serializes");
    if cli.pretty {
        println!("{left} vs {right}: {}", verdict.as_str().expect("string"));
        println!("  diff: {:?}", resource_names(compiled, &report.diff));
        println!(
            "  {left} dominates: {:?}",
            resource_names(compiled, &report.left_dominates)
        );
        println!(
            "  {right} dominates: {:?}",
            resource_names(compiled, &report.right_dominates)
        );
    } else {
        println!(
            "{}",
            json!({
                "command": "compare",
                "left": left,
                "right": right,
                "verdict": verdict,
                "diff": resource_names(compiled, &report.diff),
                "left_dominates": resource_names(compiled, &report.left_dominates),
                "right_dominates": resource_names(compiled, &report.right_dominates),
            })
        );
    }
    EXIT_OK
}

fn cmd_good(
    cli: &Cli,
    compiled: &CompiledProblem,
    start: Option<&str>,
    uniform_random: bool,
    seed: Option<u64>,
) -> u8 {
    let problem = &compiled.problem;
    let (start_value, start_allocation) = match (start, uniform_random) {
        (Some(name), false) => match compiled.allocation(name) {
            Ok(f) => (Value::String(name.to_string()), f.clone()),
            Err(e) => return emit_error("good", cli.pretty, &e),
        },
        (None, true) => {
            let seed = seed.expect("clap enforces --seed with --uniform-random");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let holders = (0..problem.resources())
                .map(|_| rng.gen_range(0..problem.agents()))
                .collect();
            let f = Allocation::from_holders(problem.agents(), holders)
                .expect("sampled holders are in range");
            (json!({ "random_seed": seed }), f)
        }
        _ => {
            eprintln!("error: exactly one of --start <NAME> or --uniform-random is required");
            return EXIT_USAGE;
        }
    };

    let trace = to_good(problem, &start_allocation);
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .map(|d| {
            json!({
                "resource": compiled.resource_name(d.resource),
                "from": compiled.agent_name(d.from_agent),
                "to": compiled.agent_name(d.to_agent),
            })
        })
        .collect();

    if cli.pretty {
        println!("start {start_value}: {} deal(s)", trace.steps.len());
        for d in &trace.steps {
            println!(
                "  {}: {} -> {}",
                compiled.resource_name(d.resource),
                compiled.agent_name(d.from_agent),
                compiled.agent_name(d.to_agent)
            );
        }
        println!("end (good): {}", assignment_line(compiled, &trace.end));
    } else {
        println!(
            "{}",
            json!({
                "command": "good",
                "start": start_value,
                "steps": steps,
                "end": allocation_value(compiled, &trace.end),
                "good": is_good(problem, &trace.end),
            })
        );
    }
    EXIT_OK
}

fn cmd_fair(cli: &Cli, compiled: &CompiledProblem) -> u8 {
    let problem = &compiled.problem;
    let parts = partition(problem);
    let classes: Vec<Value> = parts
        .classes
        .iter()
        .map(|class| {
            json!({
                "resources": class.resources.iter()
                    .map(|&r| compiled.resource_name(r)).collect::<Vec<_>>(),
                "agents": class.agents.iter()
                    .map(|&i| compiled.agent_name(i)).collect::<Vec<_>>(),
                "unrequested": class.unrequested,
                "mean": class_mean(class).to_string(),
            })
        })
        .collect();

    let fair = locally_fair(problem);
    let fair_gamma = dispersion_vector(problem, &fair)
        .expect("fair construction is good")
        .to_strings();

    let table: Vec<Value> = compiled
        .allocations
        .iter()
        .map(|(name, f)| {
            let gamma = dispersion_vector(problem, f)
                .ok()
                .map(|g| g.to_strings());
            json!({ "name": name, "good": gamma.is_some(), "gamma": gamma })
        })
        .collect();

    if cli.pretty {
        println!("classes:");
        for class in &parts.classes {
            let names: Vec<&str> = class.resources.iter().map(|&r| compiled.resource_name(r)).collect();
            let agents: Vec<&str> = class.agents.iter().map(|&i| compiled.agent_name(i)).collect();
            println!(
                "  {:?} entitled to {:?} (mean {}{})",
                names,
                agents,
                class_mean(class),
                if class.unrequested { ", unrequested" } else { "" }
            );
        }
        println!("gamma:");
        for (name, f) in &compiled.allocations {
            match dispersion_vector(problem, f) {
                Ok(g) => println!("  {name}: {:?}", g.to_strings()),
                Err(_) => println!("  {name}: not good"),
            }
        }
        println!("fair: {}", assignment_line(compiled, &fair));
        println!("  gamma: {fair_gamma:?}");
    } else {
        let mut fair_value = allocation_value(compiled, &fair);
        fair_value["gamma"] = json!(fair_gamma);
        println!(
            "{}",
            json!({
                "command": "fair",
                "classes": classes,
                "fair": fair_value,
                "allocations": table,
            })
        );
    }
    EXIT_OK
}

fn cmd_oracle(
    cli: &Cli,
    compiled: &CompiledProblem,
    kind: CheckKind,
    budget: u64,
    seed: u64,
) -> u8 {
    let budget = OracleBudget {
        max_allocations: budget,
        seed,
    };
    let report = match run_check(&compiled.problem, kind, &budget) {
        Ok(report) => report,
        Err(e) => return emit_error("oracle", cli.pretty, &e),
    };
    print_oracle_report(cli.pretty, &report);
    if report.passed {
        EXIT_OK
    } else {
        EXIT_DISCREPANCY
    }
}

fn print_oracle_report(pretty: bool, report: &CheckReport) {
    if pretty {
        let stats: Vec<String> = report
            .stats
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        let status = if report.passed { "pass" } else { "DISCREPANCY" };
        println!("{:?}: {status} ({})", report.check, stats.join(", "));
        if let Some(d) = &report.discrepancy {
            println!("  {}", d.detail);
        }
    } else {
        let mut value = serde_json::to_value(report).expect("report serializes");
        value["command"] = json!("oracle");
        println!("{value}");
    }
}
