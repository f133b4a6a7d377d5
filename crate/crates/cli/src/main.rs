use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ixgroup::operators::{eval_expr, parse_expr};
use ixgroup::suites::{run_suite, search_dictionaries, ledrappier_cocycle, shift_cocycle, Suite, SuiteRun};
use ixgroup::{Cocycle, Dictionary, Error, Point, Sampling};

#[derive(Parser)]
#[command(name = "ixgroup", version, about = "Exact verification of interaction-group identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum System {
    Shift,
    Ledrappier,
    Circle,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verification suite.
    Verify {
        /// scalar, lattice, cocycle, operators, groupoid, convolution,
        /// ledrappier, circle or counterexample
        suite: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Generator exponent bound.
        #[arg(long = "box", default_value_t = 3)]
        bound: u32,
        /// Dictionary file; the suite then runs on (S, T_D).
        #[arg(long)]
        dict: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Report wall-clock times (output is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Census of progressive dictionaries of one width.
    SearchDictionaries {
        #[arg(long)]
        width: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Evaluate an observable expression at a point.
    Eval {
        expr: String,
        #[arg(long)]
        at: String,
        #[arg(long, value_enum, default_value = "ledrappier")]
        system: System,
    },
}

fn set_jobs(jobs: Option<usize>) -> Result<(), Error> {
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Error::Precondition("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Precondition(e.to_string()))?;
    }
    Ok(())
}

fn load_dictionary(path: &PathBuf) -> Result<Dictionary, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))?;
    Dictionary::parse_file(&text)
}

fn suite_json(run: &SuiteRun, dict: Option<&PathBuf>, timings: bool) -> Value {
    let checks: Vec<Value> = run
        .checks
        .iter()
        .map(|c| {
            let mut v = json!({
                "name": c.report.check,
                "paper_ref": c.formula,
                "status": c.report.status,
                "samples": c.report.samples,
            });
            if let Some(w) = c.report.witnesses.first() {
                v["witness"] = json!(w);
            }
            v
        })
        .collect();
    json!({
        "suite": run.suite,
        "config": {
            "depth": run.config.depth,
            "box": run.config.bound,
            "dict": dict.map(|p| p.display().to_string()),
        },
        "checks": checks,
        "elapsed_ms": if timings { run.elapsed_ms } else { 0 },
    })
}

fn suite_text(run: &SuiteRun, timings: bool) -> String {
    let mut out = format!("suite {} (depth {}, box {})\n", run.suite, run.config.depth, run.config.bound);
    for c in &run.checks {
        let status = if c.report.passed() { "PASS" } else { "FAIL" };
        out += &format!("{status}  {}  [{} samples]\n      {}\n", c.report.check, c.report.samples, c.formula);
        for w in &c.report.witnesses {
            out += &format!("      witness: {w}\n");
        }
    }
    let passed = run.checks.iter().filter(|c| c.report.passed()).count();
    out += &format!("{passed}/{} checks passed", run.checks.len());
    if timings {
        out += &format!(" in {} ms", run.elapsed_ms);
    }
    out
}

fn verify(
    suite: &str,
    cfg: Sampling,
    dict: Option<&PathBuf>,
    format: Format,
    timings: bool,
) -> Result<bool, Error> {
    let suite: Suite = suite.parse()?;
    let d = dict.map(load_dictionary).transpose()?;
    let run = run_suite(suite, cfg, d.as_ref())?;
    match format {
        Format::Text => println!("{}", suite_text(&run, timings)),
        Format::Json => println!("{}", suite_json(&run, dict, timings)),
    }
    Ok(run.passed())
}

fn census(width: usize, depth: usize, format: Format) -> Result<(), Error> {
    let rows = search_dictionaries(width, depth)?;
    match format {
        Format::Json => println!("{}", json!({ "width": width, "depth": depth, "dictionaries": rows })),
        Format::Text => {
            println!("{} progressive dictionaries of width {width} (depth {depth})", rows.len());
            for r in &rows {
                let rel = match &r.relation_witness {
                    None => "relations commute".to_string(),
                    Some(w) => format!("relations do not commute: {w}"),
                };
                let star = match &r.star_witness {
                    None => "star-commuting".to_string(),
                    Some(w) => format!("not star-commuting: {w}"),
                };
                println!("{}  {rel}; {star}", r.dictionary);
            }
        }
    }
    Ok(())
}

fn eval(expr: &str, at: &str, system: System) -> Result<(), Error> {
    let omega = match system {
        System::Shift => shift_cocycle()?,
        System::Ledrappier => ledrappier_cocycle()?,
        System::Circle => Cocycle::reciprocal(),
    };
    let e = parse_expr(expr, omega.action().group())?;
    let x: Point = at.parse()?;
    println!("{}", eval_expr(&e, &omega, &x)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { suite, depth, bound, dict, format, jobs, timings } => set_jobs(jobs)
            .and_then(|_| verify(&suite, Sampling::new(depth, bound), dict.as_ref(), format, timings)),
        Command::SearchDictionaries { width, depth, format, jobs } => {
            set_jobs(jobs).and_then(|_| census(width, depth, format)).map(|_| true)
        }
        Command::Eval { expr, at, system } => eval(&expr, &at, system).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
