//! `matched-proj`: analyze idempotents, construct projections at a given
//! distance, run the property suites, and write example families.
//!
//! Exit codes: 0 success, 1 bad input or usage, 2 numeric failure, 3 suite failure.

mod io;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use matched_proj::families::{families, FamilyParams};
use matched_proj::matched::{routes, DEFAULT_ROUTE};
use matched_proj::range::{construct_at_distance, DEFAULT_TOL};
use matched_proj::verify::{self, SuiteConfig};
use matched_proj::Idempotent;
use serde_json::{json, Map, Value};

use crate::io::{companion_path, fmt15, matrix_to_value, read_matrix, sidecar_path, write_json, write_matrix, write_text};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    /// Already reported on stdout.
    SuiteFailure,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::SuiteFailure => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) => f.write_str(m),
            CliError::SuiteFailure => f.write_str("property suite failure"),
        }
    }
}

impl From<matched_proj::Error> for CliError {
    fn from(e: matched_proj::Error) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(name = "matched-proj", version, about = "Nearest, farthest and prescribed-distance projections of idempotent matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Matched projection, distance extremes and (with --projection) bounds for a covering projection.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        projection: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        /// How m(Q) is computed.
        #[arg(long, default_value = DEFAULT_ROUTE)]
        route: String,
    },
    /// A projection at Frobenius distance alpha from the input.
    Construct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run the randomized property suites.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        max_dim: usize,
        /// Run only these suites (repeatable).
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Also run the suites that exist to fail.
        #[arg(long)]
        self_test: bool,
        /// List suite names and exit.
        #[arg(long)]
        list: bool,
    },
    /// Write an example family member with its closed-form sidecar.
    Family {
        #[arg(long)]
        name: String,
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        output: PathBuf,
    },
}

fn suite_registry() -> matched_proj::registry::Registry<dyn verify::PropertySuite> {
    let mut reg = verify::suites();
    suites::register_cli_suites(&mut reg).expect("unique suite names");
    reg
}

fn cmd_analyze(input: PathBuf, projection: Option<PathBuf>, output: PathBuf, route: String) -> Result<(), CliError> {
    routes().get(&route)?;
    let q = read_matrix(&input)?;
    let p = projection.as_deref().map(read_matrix).transpose()?;
    let report = report::analysis_report(&q, p.as_ref(), &route)?;
    write_json(&output, &report)
}

fn cmd_construct(input: PathBuf, alpha: f64, tol: f64, output: PathBuf) -> Result<(), CliError> {
    let q = Idempotent::new(io::round_matrix(&read_matrix(&input)?))?;
    let point = construct_at_distance(&q, alpha, tol).map_err(|e| match e {
        matched_proj::Error::OutOfRange { min, max, .. } => CliError::Usage(format!(
            "alpha {alpha} outside the attainable range [{}, {}]",
            fmt15(min),
            fmt15(max)
        )),
        other => other.into(),
    })?;
    write_matrix(&output, point.projection.matrix())?;
    let sidecar = json!({
        "segment": point.segment.as_str(),
        "path_index": point.path_index,
        "t": fmt15(point.t),
        "achieved_distance": fmt15(point.achieved_distance),
    });
    write_text(&sidecar_path(&output), &format!("{sidecar}\n"))
}

fn cmd_verify(cfg: SuiteConfig, only: Vec<String>, self_test: bool, list: bool) -> Result<(), CliError> {
    let reg = suite_registry();
    if list {
        for s in reg.iter() {
            let tag = if s.is_self_test() { " (self-test)" } else { "" };
            println!("{:<26}{}{tag}", s.name(), s.description());
        }
        return Ok(());
    }
    cfg.validate()?;
    // suites run in parallel; outcomes are reported in registration order
    for name in &only {
        reg.get(name)?;
    }
    let selected: Vec<_> = reg
        .iter()
        .filter(|s| {
            if only.is_empty() {
                self_test || !s.is_self_test()
            } else {
                only.iter().any(|n| n == s.name())
            }
        })
        .collect();
    let outcomes: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = selected.iter().map(|s| scope.spawn(move || s.run(&cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("suite thread")).collect()
    });

    let mut failures = Vec::new();
    for o in &outcomes {
        match &o.failure {
            None => eprintln!("PASS {:<26} {:>7} checks {:>9.2?}", o.name, o.checks, o.elapsed),
            Some(c) => {
                eprintln!("FAIL {:<26} {}", o.name, c.detail);
                let matrices: Map<String, Value> =
                    c.matrices.iter().map(|(k, m)| (k.clone(), matrix_to_value(m))).collect();
                failures.push(json!({ "suite": o.name, "detail": c.detail, "counterexample": matrices }));
            }
        }
    }
    let passed = outcomes.len() - failures.len();
    eprintln!("{passed}/{} suites passed (seed {}, trials {}, max_dim {})", outcomes.len(), cfg.seed, cfg.trials, cfg.max_dim);
    if failures.is_empty() {
        return Ok(());
    }
    println!("{}", json!({ "seed": cfg.seed, "trials": cfg.trials, "max_dim": cfg.max_dim, "failures": failures }));
    Err(CliError::SuiteFailure)
}

fn cmd_family(name: String, a: Option<f64>, n: Option<usize>, output: PathBuf) -> Result<(), CliError> {
    let reg = families();
    let out = reg.get(&name)?.build(&FamilyParams { a, n })?;
    write_matrix(&output, &out.matrix)?;
    let mut written = Vec::new();
    for (role, m) in &out.companions {
        let path = companion_path(&output, role);
        write_matrix(&path, m)?;
        written.push((role.to_string(), path.display().to_string()));
    }
    write_json(&sidecar_path(&output), &report::family_sidecar(&name, &out, &written))
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
        Command::Analyze { input, projection, output, route } => cmd_analyze(input, projection, output, route),
        Command::Construct { input, alpha, tol, output } => cmd_construct(input, alpha, tol, output),
        Command::Verify { seed, trials, max_dim, suites, self_test, list } => {
            cmd_verify(SuiteConfig { seed, trials, max_dim }, suites, self_test, list)
        }
        Command::Family { name, a, n, output } => cmd_family(name, a, n, output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::SuiteFailure) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.code())
        }
    }
}
