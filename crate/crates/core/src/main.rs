use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use prosumer_qaoa::harness::{self, timing, ExperimentSpec, NumMinVar};
use prosumer_qaoa::qaoa::{self, ObjectiveMode, OptimizerConfig};
use prosumer_qaoa::simulator::DEFAULT_QUBIT_LIMIT;
use prosumer_qaoa::{rqaoa, Error, Instance, ProsumerProblem, Result};

#[derive(Parser)]
#[command(name = "prosumer-qaoa", version, about = "Prosumer load scheduling with QAOA and recursive QAOA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMethod {
    Qaoa,
    Rqaoa,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

#[derive(Subcommand)]
enum Command {
    /// Run QAOA or recursive QAOA on one problem.
    Solve {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "qaoa")]
        method: SolveMethod,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = 4096)]
        shots: u64,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
        #[arg(long, env = harness::SEED_ENV, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        /// Recursion floor for rqaoa: an integer or `N-k`.
        #[arg(long, default_value = "N-2")]
        num_min_var: String,
        /// Objective calls per restart (default 1000 * reps).
        #[arg(long)]
        max_evaluations: Option<usize>,
        #[arg(long)]
        initial_step: Option<f64>,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Enumerate the compiled model and print its ground states.
    Exact {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Print the QUBO and Ising coefficients of a problem.
    Transform {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Run a sweep described by a JSON spec, writing runs.csv and summary.json.
    Experiment {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Time fixed-budget QAOA solves against reps and qubit count.
    Timing {
        #[arg(long)]
        spec: PathBuf,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(value: &Value, output: Option<&PathBuf>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_num_min_var(s: &str) -> NumMinVar {
    match s.trim().parse::<usize>() {
        Ok(k) => NumMinVar::Absolute(k),
        Err(_) => NumMinVar::Relative(s.to_string()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve {
            problem,
            method,
            reps,
            shots,
            restarts,
            seed,
            mode,
            num_min_var,
            max_evaluations,
            initial_step,
            output,
        } => {
            let instance = Instance::compile(&ProsumerProblem::load(&problem)?, DEFAULT_QUBIT_LIMIT)?;
            let defaults = OptimizerConfig::default();
            let config = OptimizerConfig {
                restarts,
                max_evaluations,
                initial_step: initial_step.unwrap_or(defaults.initial_step),
                seed,
                mode: match mode {
                    Mode::Exact => ObjectiveMode::Exact,
                    Mode::Sampled => ObjectiveMode::Sampled { shots },
                },
                ..defaults
            };
            let (result, ms) = match method {
                SolveMethod::Qaoa => {
                    let r = qaoa::run_qaoa(&instance, reps, shots, &config)?;
                    (serde_json::to_value(&r)?, r.wall_time_ms)
                }
                SolveMethod::Rqaoa => {
                    let k = parse_num_min_var(&num_min_var).resolve(instance.num_qubits())?;
                    let r = rqaoa::run_rqaoa(&instance, k, reps, &config)?;
                    (serde_json::to_value(&r)?, r.wall_time_ms)
                }
            };
            emit(&json!({ "result": result, "wall_time_ms": ms }), output.as_ref())
        }
        Command::Exact { problem } => {
            let instance = Instance::compile(&ProsumerProblem::load(&problem)?, DEFAULT_QUBIT_LIMIT)?;
            emit(&harness::report::exact_report(&instance)?, None)
        }
        Command::Transform { problem } => {
            emit(&harness::report::transform_report(&ProsumerProblem::load(&problem)?)?, None)
        }
        Command::Experiment { spec, out, jobs } => {
            let mut spec_data = ExperimentSpec::load(&spec)?;
            if let Ok(v) = std::env::var(harness::SEED_ENV) {
                spec_data.base_seed = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("{} must be an integer", harness::SEED_ENV)))?;
            }
            let dir = out
                .or_else(|| spec_data.output_dir.clone())
                .ok_or_else(|| Error::InvalidArgument("no output directory: pass --out or set output_dir".into()))?;
            let output = harness::run_experiment(&spec_data, jobs)?;
            harness::write_outputs(&output, &dir)?;
            eprintln!("wrote {} rows to {}", output.rows.len(), dir.display());
            Ok(())
        }
        Command::Timing { spec, out } => {
            let spec = timing::TimingSpec::load(&spec)?;
            let rows = timing::timing_study(&spec)?;
            match out {
                Some(path) => timing::write_csv(&rows, &path),
                None => {
                    let mut w = csv::Writer::from_writer(std::io::stdout());
                    for row in &rows {
                        w.serialize(row)?;
                    }
                    w.flush()?;
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_limit() { 2 } else { 1 })
        }
    }
}
