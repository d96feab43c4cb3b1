//! `swan`: evaluate placements and run Monte-Carlo sweeps from JSON files.
//!
//! Exit codes: 0 success, 2 malformed or invalid input, 3 infeasible
//! placement, 4 I/O failure. Machine output goes to stdout, diagnostics to stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use swan_core::baseline::optimize_pass;
use swan_core::harness::{run_sweep, ExperimentSpec};
use swan_core::opt_sa::{optimize_sa, AoOptions};
use swan_core::opt_ss::{optimize_ss, SsOptions};
use swan_core::scenario::ScenarioFile;
use swan_core::{evaluate_placements, Placement, Protocol, RateReport, Scheme, SwanError};

#[derive(Parser)]
#[command(name = "swan", version, about = "Segmented-waveguide pinching-antenna placement and sum-rate tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize (or evaluate a given) placement for one scenario and print the rates as JSON.
    Eval(EvalArgs),
    /// Run a Monte-Carlo sweep and write the aggregated CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Scenario JSON: radio parameters, layout and users.
    #[arg(long)]
    config: PathBuf,
    /// Placement JSON: one placement object, or an array with one per user slot.
    #[arg(long)]
    placement: Option<PathBuf>,
    #[arg(long, default_value = "SS")]
    protocol: Protocol,
    #[arg(long, default_value = "PS-TDMA")]
    scheme: Scheme,
    /// Grid points per search interval.
    #[arg(long = "grid-q", default_value_t = 10_000)]
    grid_q: usize,
    /// Re-evaluate the placement at this attenuation in dB/m.
    #[arg(long = "kappa-eval")]
    kappa_eval: Option<f64>,
    /// Relative convergence threshold of the alternating optimization.
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
    #[arg(long = "max-iters", default_value_t = 50)]
    max_iters: usize,
}

#[derive(Args)]
struct SweepArgs {
    /// Experiment spec JSON.
    #[arg(long)]
    spec: PathBuf,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the rows as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long = "grid-q")]
    grid_q: Option<usize>,
    /// Re-evaluate the designed placements at this attenuation in dB/m.
    #[arg(long = "kappa-eval")]
    kappa_eval: Option<f64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Self { code: 2, error: error.into() }
    }

    fn io(error: impl Into<anyhow::Error>) -> Self {
        Self { code: 4, error: error.into() }
    }
}

impl From<SwanError> for Failure {
    fn from(e: SwanError) -> Self {
        let code = match e {
            SwanError::Infeasible(_) | SwanError::ArityMismatch { .. } | SwanError::SegmentOutOfRange { .. } => 3,
            _ => 2,
        };
        Self { code, error: e.into() }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::io)
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .with_context(|| format!("cannot parse {}", path.display()))
        .map_err(Failure::input)
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::io)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PlacementFile {
    One(Placement),
    Many(Vec<Placement>),
}

#[derive(Serialize)]
struct EvalOutput {
    report: RateReport,
    placements: Vec<Placement>,
}

fn eval(args: EvalArgs) -> CliResult<()> {
    let file: ScenarioFile = parse_json(&args.config)?;
    let scenario = file.into_scenario()?;
    let (users, layout, cfg) = (&scenario.users, &scenario.layout, &scenario.cfg);

    let (placements, report) = match &args.placement {
        Some(path) => {
            let placements = match parse_json::<PlacementFile>(path)? {
                PlacementFile::One(p) => vec![p],
                PlacementFile::Many(ps) => ps,
            };
            let report = evaluate_placements(users, &placements, layout, cfg, args.protocol, args.scheme)?;
            (placements, report)
        }
        None => match args.protocol {
            Protocol::Ss => {
                let opts = SsOptions {
                    grid_points: args.grid_q,
                    newton: false,
                };
                let sol = optimize_ss(users, layout, cfg, args.scheme, &opts)?;
                (sol.placements, sol.report)
            }
            Protocol::Sa => {
                let opts = AoOptions {
                    grid_points: args.grid_q,
                    tolerance: args.tolerance,
                    max_iters: args.max_iters,
                };
                let sol = optimize_sa(users, layout, cfg, args.scheme, &opts)?;
                (sol.placements, sol.report)
            }
            Protocol::Pass => {
                let sol = optimize_pass(users, cfg, layout.first_feed(), layout.span(), args.scheme, args.grid_q)?;
                let placements = sol
                    .positions
                    .iter()
                    .map(|&position| Placement::Ss { segment: 0, position })
                    .collect();
                (placements, sol.report)
            }
        },
    };
    let report = match args.kappa_eval {
        Some(k) => {
            let lossy = cfg.with_attenuation(k)?;
            evaluate_placements(users, &placements, layout, &lossy, args.protocol, args.scheme)?
        }
        None => report,
    };
    let out = serde_json::to_string_pretty(&EvalOutput { report, placements }).map_err(Failure::input)?;
    println!("{out}");
    Ok(())
}

fn sweep(args: SweepArgs) -> CliResult<()> {
    let mut spec: ExperimentSpec = parse_json(&args.spec)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(trials) = args.trials {
        spec.trials = trials;
    }
    if let Some(q) = args.grid_q {
        spec.grid_points = q;
    }
    if let Some(k) = args.kappa_eval {
        spec.kappa_eval_db_per_m = Some(k);
    }
    spec.validate()?;

    let result = match args.threads {
        Some(0) => return Err(Failure::input(anyhow!("--threads must be >= 1"))),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(Failure::io)?
            .install(|| run_sweep(&spec))?,
        None => run_sweep(&spec)?,
    };

    let csv = result.to_csv();
    match &args.out {
        Some(path) => write_text(path, &csv)?,
        None => std::io::stdout()
            .write_all(csv.as_bytes())
            .context("cannot write to stdout")
            .map_err(Failure::io)?,
    }
    if let Some(path) = &args.json {
        write_text(path, &result.to_json())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Eval(args) => eval(args),
        Command::Sweep(args) => sweep(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
