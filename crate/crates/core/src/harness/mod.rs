//! Experiment sweeps over problems, methods, repetitions and recursion depth,
//! with per-run rows and per-cell aggregates.

pub mod report;
pub mod stats;
pub mod timing;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::problem::ProsumerProblem;
use crate::qaoa::{self, ObjectiveMode, OptimizerConfig};
use crate::rational::to_f64;
use crate::rqaoa;
use crate::simulator::DEFAULT_QUBIT_LIMIT;

pub use stats::{linear_fit, median, LinearFit, Summary};

/// Environment variable overriding the base seed of experiments.
pub const SEED_ENV: &str = "PROSUMER_QAOA_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Qaoa,
    Rqaoa,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Qaoa => "qaoa",
            Method::Rqaoa => "rqaoa",
        })
    }
}

/// Recursion floor, either absolute or relative to the qubit count (`"N-2"`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumMinVar {
    Absolute(usize),
    Relative(String),
}

impl NumMinVar {
    pub fn resolve(&self, num_qubits: usize) -> Result<usize> {
        let value = match self {
            NumMinVar::Absolute(k) => *k,
            NumMinVar::Relative(s) => {
                let bad = || Error::InvalidArgument(format!("num_min_var {s:?} is not of the form N-k"));
                let k: usize = s
                    .trim()
                    .strip_prefix('N')
                    .and_then(|rest| rest.trim().strip_prefix('-'))
                    .ok_or_else(bad)?
                    .trim()
                    .parse()
                    .map_err(|_| bad())?;
                num_qubits
                    .checked_sub(k)
                    .ok_or_else(|| Error::InvalidArgument(format!("{s} is negative for N = {num_qubits}")))?
            }
        };
        if value == 0 || value >= num_qubits {
            return Err(Error::InvalidArgument(format!(
                "num_min_var {value} must be in 1..{num_qubits}"
            )));
        }
        Ok(value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    #[default]
    Exact,
    Sampled,
}

fn default_shots() -> u64 {
    4096
}
fn default_runs() -> usize {
    20
}
fn default_restarts() -> usize {
    5
}
fn default_reps() -> Vec<usize> {
    vec![1]
}
fn default_step() -> f64 {
    OptimizerConfig::default().initial_step
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Problem files; relative paths resolve against the spec file.
    pub problems: Vec<PathBuf>,
    pub methods: Vec<Method>,
    #[serde(default = "default_reps")]
    pub reps: Vec<usize>,
    #[serde(default)]
    pub num_min_var: Vec<NumMinVar>,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub max_evaluations: Option<usize>,
    #[serde(default = "default_step")]
    pub initial_step: f64,
    #[serde(default)]
    pub mode: ModeName,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut spec: ExperimentSpec = serde_json::from_str(&fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for p in &mut spec.problems {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.problems.is_empty() {
            return fail("experiment needs at least one problem");
        }
        if self.methods.is_empty() {
            return fail("experiment needs at least one method");
        }
        if self.runs == 0 {
            return fail("runs must be at least 1");
        }
        if self.shots == 0 {
            return fail("shots must be at least 1");
        }
        if self.restarts == 0 {
            return fail("restarts must be at least 1");
        }
        let needs_reps = self.methods.iter().any(|m| *m != Method::Exact);
        if needs_reps && (self.reps.is_empty() || self.reps.contains(&0)) {
            return fail("reps entries must be at least 1");
        }
        if self.methods.contains(&Method::Rqaoa) && self.num_min_var.is_empty() {
            return fail("rqaoa needs at least one num_min_var entry");
        }
        Ok(())
    }

    pub fn objective_mode(&self) -> ObjectiveMode {
        match self.mode {
            ModeName::Exact => ObjectiveMode::Exact,
            ModeName::Sampled => ObjectiveMode::Sampled { shots: self.shots },
        }
    }

    fn optimizer(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts,
            max_evaluations: self.max_evaluations,
            initial_step: self.initial_step,
            seed,
            mode: self.objective_mode(),
            ..OptimizerConfig::default()
        }
    }
}

/// One output line per (cell, run).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub problem: String,
    pub method: Method,
    pub qubits: usize,
    pub reps: Option<usize>,
    pub num_min_var: Option<usize>,
    pub run: usize,
    pub seed: u64,
    pub p_best: f64,
    pub p_adm: f64,
    pub objective: f64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub problem: String,
    pub method: Method,
    pub qubits: usize,
    pub reps: Option<usize>,
    pub num_min_var: Option<usize>,
    pub runs: usize,
    pub p_best: Summary,
    pub p_adm: Summary,
    pub objective: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellTiming {
    pub problem: String,
    pub method: Method,
    pub qubits: usize,
    pub reps: Option<usize>,
    pub num_min_var: Option<usize>,
    pub wall_time_ms: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOutput {
    #[serde(skip)]
    pub rows: Vec<ExperimentRow>,
    pub cells: Vec<CellSummary>,
    /// Timing aggregates are kept apart so `cells` is reproducible byte for byte.
    pub timing: Vec<CellTiming>,
}

#[derive(Debug, Clone)]
struct Cell {
    problem: usize,
    method: Method,
    reps: Option<usize>,
    num_min_var: Option<usize>,
}

fn problem_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Runs every (problem, method, reps, num_min_var) cell `spec.runs` times with
/// seeds `base_seed + run`, on at most `jobs` threads. Row order is canonical:
/// problems, methods, reps and num_min_var in spec order, then run index.
pub fn run_experiment(spec: &ExperimentSpec, jobs: usize) -> Result<ExperimentOutput> {
    spec.validate()?;
    let problems: Vec<ProsumerProblem> = spec
        .problems
        .iter()
        .map(ProsumerProblem::load)
        .collect::<Result<_>>()?;
    let labels: Vec<String> = spec.problems.iter().map(|p| problem_label(p)).collect();
    let instances: Vec<Instance> = problems
        .iter()
        .map(|p| Instance::compile(p, DEFAULT_QUBIT_LIMIT))
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for (pi, instance) in instances.iter().enumerate() {
        for &method in &spec.methods {
            match method {
                Method::Exact => cells.push(Cell { problem: pi, method, reps: None, num_min_var: None }),
                Method::Qaoa => {
                    for &r in &spec.reps {
                        cells.push(Cell { problem: pi, method, reps: Some(r), num_min_var: None });
                    }
                }
                Method::Rqaoa => {
                    for &r in &spec.reps {
                        for k in &spec.num_min_var {
                            let k = k.resolve(instance.num_qubits())?;
                            cells.push(Cell { problem: pi, method, reps: Some(r), num_min_var: Some(k) });
                        }
                    }
                }
            }
        }
    }

    let work: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..spec.runs).map(move |r| (c, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let rows: Vec<ExperimentRow> = pool.install(|| {
        work.par_iter()
            .map(|&(c, run)| {
                let cell = &cells[c];
                run_cell(spec, &instances[cell.problem], &labels[cell.problem], cell, run)
            })
            .collect::<Result<_>>()
    })?;

    let mut summaries = Vec::new();
    let mut timing = Vec::new();
    for chunk in rows.chunks(spec.runs) {
        let first = &chunk[0];
        let pick = |f: fn(&ExperimentRow) -> f64| {
            Summary::of(&chunk.iter().map(f).collect::<Vec<_>>()).expect("runs ≥ 1")
        };
        summaries.push(CellSummary {
            problem: first.problem.clone(),
            method: first.method,
            qubits: first.qubits,
            reps: first.reps,
            num_min_var: first.num_min_var,
            runs: chunk.len(),
            p_best: pick(|r| r.p_best),
            p_adm: pick(|r| r.p_adm),
            objective: pick(|r| r.objective),
        });
        timing.push(CellTiming {
            problem: first.problem.clone(),
            method: first.method,
            qubits: first.qubits,
            reps: first.reps,
            num_min_var: first.num_min_var,
            wall_time_ms: pick(|r| r.wall_time_ms),
        });
    }
    Ok(ExperimentOutput { rows, cells: summaries, timing })
}

fn run_cell(spec: &ExperimentSpec, instance: &Instance, label: &str, cell: &Cell, run: usize) -> Result<ExperimentRow> {
    let seed = spec.base_seed.wrapping_add(run as u64);
    let (p_best, p_adm, objective, wall_time_ms) = match cell.method {
        Method::Exact => {
            let start = std::time::Instant::now();
            let ground = crate::bruteforce::ground_states(&instance.spin, DEFAULT_QUBIT_LIMIT)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let adm = ground.states.iter().all(|&b| instance.is_admissible(b));
            let hit = if adm { 1.0 } else { 0.0 };
            (hit, hit, to_f64(&ground.energy), ms)
        }
        Method::Qaoa => {
            let reps = cell.reps.expect("qaoa cell has reps");
            let r = qaoa::run_qaoa(instance, reps, spec.shots, &spec.optimizer(seed))?;
            (r.p_best, r.p_adm, r.objective, r.wall_time_ms)
        }
        Method::Rqaoa => {
            let reps = cell.reps.expect("rqaoa cell has reps");
            let k = cell.num_min_var.expect("rqaoa cell has num_min_var");
            let r = rqaoa::run_rqaoa(instance, k, reps, &spec.optimizer(seed))?;
            let flag = |b: bool| if b { 1.0 } else { 0.0 };
            (flag(r.optimal), flag(r.admissible), r.energy_value, r.wall_time_ms)
        }
    };
    Ok(ExperimentRow {
        problem: label.to_string(),
        method: cell.method,
        qubits: instance.num_qubits(),
        reps: cell.reps,
        num_min_var: cell.num_min_var,
        run,
        seed,
        p_best,
        p_adm,
        objective,
        wall_time_ms,
    })
}

pub const RUNS_CSV: &str = "runs.csv";
pub const SUMMARY_JSON: &str = "summary.json";

/// Writes `runs.csv` and `summary.json` into `dir`.
pub fn write_outputs(output: &ExperimentOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join(RUNS_CSV))?;
    for row in &output.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    let mut json = serde_json::to_string_pretty(output)?;
    json.push('\n');
    fs::write(dir.join(SUMMARY_JSON), json)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn num_min_var_forms() {
        assert_eq!(NumMinVar::Relative("N-2".into()).resolve(8).unwrap(), 6);
        assert_eq!(NumMinVar::Relative(" N - 1 ".into()).resolve(4).unwrap(), 3);
        assert_eq!(NumMinVar::Absolute(3).resolve(8).unwrap(), 3);
        assert!(NumMinVar::Absolute(8).resolve(8).is_err());
        assert!(NumMinVar::Relative("N-9".into()).resolve(8).is_err());
        assert!(NumMinVar::Relative("M-2".into()).resolve(8).is_err());
        let parsed: Vec<NumMinVar> = serde_json::from_str(r#"[2, "N-2"]"#).unwrap();
        assert_eq!(parsed, vec![NumMinVar::Absolute(2), NumMinVar::Relative("N-2".into())]);
    }

    #[test]
    fn spec_defaults_and_validation() {
        let spec: ExperimentSpec =
            serde_json::from_str(r#"{"problems": ["a.json"], "methods": ["qaoa"], "reps": [2]}"#).unwrap();
        assert_eq!((spec.shots, spec.runs, spec.restarts), (4096, 20, 5));
        assert!(spec.validate().is_ok());
        let bad = ExperimentSpec { runs: 0, ..spec.clone() };
        assert!(bad.validate().is_err());
        let bad = ExperimentSpec { reps: vec![0], ..spec.clone() };
        assert!(bad.validate().is_err());
        let bad = ExperimentSpec { methods: vec![Method::Rqaoa], ..spec };
        assert!(bad.validate().is_err());
    }
}
