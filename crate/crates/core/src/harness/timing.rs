//! Wall-time study of the QAOA loop against `reps` and qubit count.
//!
//! Every timed solve uses one restart, a fixed evaluation budget and a
//! negative tolerance, so each run performs exactly `evaluations` objective
//! calls and time is proportional to the work per call. On a statevector
//! simulator that work is Θ(reps · N · 2^N): time grows linearly in `reps`
//! and roughly quadruples for every two extra qubits. A flat time-vs-qubits
//! curve is a property of physical devices and cannot be reproduced here.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::problem::ProsumerProblem;
use crate::qaoa::{self, OptimizerConfig};
use crate::simulator::DEFAULT_QUBIT_LIMIT;

use super::stats::{linear_fit, LinearFit, Summary};

fn default_evaluations() -> usize {
    200
}
fn default_repeats() -> usize {
    5
}
fn default_shots() -> u64 {
    4096
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingSpec {
    pub problems: Vec<PathBuf>,
    pub reps: Vec<usize>,
    /// Objective calls per timed solve.
    #[serde(default = "default_evaluations")]
    pub evaluations: usize,
    /// Timed solves per (problem, reps) point.
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub base_seed: u64,
}

impl TimingSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut spec: TimingSpec = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for p in &mut spec.problems {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub problem: String,
    pub qubits: usize,
    pub reps: usize,
    pub median_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

/// Times `run_qaoa` for every (problem, reps) pair.
///
/// One untimed pass warms every point, then repeats run round-robin over the
/// points so a transient slowdown is spread across them instead of landing on one.
pub fn timing_study(spec: &TimingSpec) -> Result<Vec<TimingRow>> {
    if spec.repeats == 0 || spec.evaluations == 0 || spec.reps.contains(&0) {
        return Err(Error::InvalidArgument("repeats, evaluations and reps must be at least 1".into()));
    }
    let instances = spec
        .problems
        .iter()
        .map(|p| {
            let problem = ProsumerProblem::load(p)?;
            Ok((super::problem_label(p), Instance::compile(&problem, DEFAULT_QUBIT_LIMIT)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(usize, usize)> =
        (0..instances.len()).flat_map(|i| spec.reps.iter().map(move |&r| (i, r))).collect();
    for &(i, reps) in &points {
        time_qaoa(&instances[i].1, reps, spec.base_seed, spec)?;
    }
    let mut times = vec![Vec::with_capacity(spec.repeats); points.len()];
    for r in 0..spec.repeats {
        for (k, &(i, reps)) in points.iter().enumerate() {
            times[k].push(time_qaoa(&instances[i].1, reps, spec.base_seed.wrapping_add(r as u64), spec)?);
        }
    }
    Ok(points
        .iter()
        .zip(&times)
        .map(|(&(i, reps), t)| {
            let s = Summary::of(t).expect("repeats >= 1");
            TimingRow {
                problem: instances[i].0.clone(),
                qubits: instances[i].1.num_qubits(),
                reps,
                median_ms: s.median,
                min_ms: s.min,
                max_ms: s.max,
            }
        })
        .collect())
}

/// Wall time in milliseconds of one fixed-budget solve.
pub fn time_qaoa(instance: &Instance, reps: usize, seed: u64, spec: &TimingSpec) -> Result<f64> {
    let config = OptimizerConfig {
        restarts: 1,
        max_evaluations: Some(spec.evaluations),
        tolerance: -1.0,
        seed,
        ..OptimizerConfig::default()
    };
    let start = Instant::now();
    qaoa::run_qaoa(instance, reps, spec.shots, &config)?;
    Ok(start.elapsed().as_secs_f64() * 1e3)
}

/// Least-squares fit of median time against reps, over rows with `qubits = n`.
pub fn reps_fit(rows: &[TimingRow], n: usize) -> Option<LinearFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.qubits == n)
        .map(|r| (r.reps as f64, r.median_ms))
        .unzip();
    (xs.len() >= 2).then(|| linear_fit(&xs, &ys))
}

/// Median-time ratios between consecutive qubit counts at fixed `reps`.
pub fn size_ratios(rows: &[TimingRow], reps: usize) -> Vec<(usize, usize, f64)> {
    let mut pts: Vec<(usize, f64)> = rows
        .iter()
        .filter(|r| r.reps == reps)
        .map(|r| (r.qubits, r.median_ms))
        .collect();
    pts.sort_by_key(|p| p.0);
    pts.windows(2).map(|w| (w[0].0, w[1].0, w[1].1 / w[0].1)).collect()
}

pub fn write_csv(rows: &[TimingRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
