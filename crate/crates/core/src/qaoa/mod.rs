//! The variational loop: ansatz preparation, classical parameter search with
//! restarted Nelder–Mead, final sampling and success metrics.

pub mod nelder_mead;

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{PI, TAU};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis;
use crate::bruteforce;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::seed::derive_seed;
use crate::simulator::{sampled_energy, CostDiagonal, Counts, Statevector, DEFAULT_QUBIT_LIMIT};
use crate::transform::SpinModel;

use nelder_mead::NelderMead;

/// Seed stream reserved for the final measurement of a run.
const SAMPLE_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(Error::InvalidArgument(format!(
                "need equal, non-zero numbers of gammas and betas (got {} and {})",
                gammas.len(),
                betas.len()
            )));
        }
        Ok(Self { gammas, betas })
    }

    pub fn zeros(reps: usize) -> Self {
        Self {
            gammas: vec![0.0; reps],
            betas: vec![0.0; reps],
        }
    }

    pub fn reps(&self) -> usize {
        self.gammas.len()
    }

    /// `[γ_1..γ_p, β_1..β_p]`.
    pub fn to_vector(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn from_vector(v: &[f64]) -> Self {
        let reps = v.len() / 2;
        Self {
            gammas: v[..reps].to_vec(),
            betas: v[reps..].to_vec(),
        }
    }

    fn random(reps: usize, rng: &mut impl Rng) -> Self {
        Self {
            gammas: (0..reps).map(|_| rng.random_range(0.0..TAU)).collect(),
            betas: (0..reps).map(|_| rng.random_range(0.0..PI)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveMode {
    /// Exact energy expectation from the statevector.
    #[default]
    Exact,
    /// Mean energy over `shots` simulated measurements.
    Sampled { shots: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Per restart; `None` means `1000 * reps`.
    pub max_evaluations: Option<usize>,
    pub tolerance: f64,
    /// Initial simplex edge, radians.
    pub initial_step: f64,
    pub seed: u64,
    pub mode: ObjectiveMode,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 5,
            max_evaluations: None,
            tolerance: 1e-6,
            initial_step: 0.1,
            seed: 0,
            mode: ObjectiveMode::Exact,
        }
    }
}

impl OptimizerConfig {
    pub fn evaluation_budget(&self, reps: usize) -> usize {
        self.max_evaluations.unwrap_or(1000 * reps)
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        if let ObjectiveMode::Sampled { shots: 0 } = self.mode {
            return Err(Error::InvalidArgument("sampled objective needs shots ≥ 1".into()));
        }
        Ok(())
    }
}

/// Uniform superposition followed by `reps` rounds of cost then mixer layers.
pub fn ansatz_state(diag: &CostDiagonal, params: &QaoaParams) -> Result<Statevector> {
    if diag.is_empty() || !diag.len().is_power_of_two() {
        return Err(Error::InvalidArgument("cost diagonal length must be a power of two".into()));
    }
    let n = diag.len().trailing_zeros() as usize;
    let mut state = Statevector::uniform(n, DEFAULT_QUBIT_LIMIT)?;
    state.apply_layers(diag, &params.gammas, &params.betas)?;
    Ok(state)
}

/// Energy estimate of the ansatz at `params`; `seed` only matters in sampled mode.
pub fn objective(diag: &CostDiagonal, params: &QaoaParams, mode: ObjectiveMode, seed: u64) -> Result<f64> {
    let state = ansatz_state(diag, params)?;
    match mode {
        ObjectiveMode::Exact => state.expectation(diag),
        ObjectiveMode::Sampled { shots } => sampled_energy(&state.sample(shots, seed), diag),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartRecord {
    pub restart: usize,
    pub seed: u64,
    pub initial: QaoaParams,
    pub final_value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimized {
    pub params: QaoaParams,
    pub value: f64,
    pub evaluations: usize,
    pub restarts: Vec<RestartRecord>,
}

pub fn optimize(model: &SpinModel, reps: usize, config: &OptimizerConfig) -> Result<Optimized> {
    let spectrum = bruteforce::diagonal(model, DEFAULT_QUBIT_LIMIT)?;
    optimize_diagonal(&CostDiagonal::from(&spectrum), reps, config)
}

/// Restarted Nelder–Mead over `[γ, β]`. Restart `r` draws its start point from
/// `derive_seed(config.seed, r)`; the best final value wins, earliest restart on ties.
pub fn optimize_diagonal(diag: &CostDiagonal, reps: usize, config: &OptimizerConfig) -> Result<Optimized> {
    if reps == 0 {
        return Err(Error::InvalidArgument("reps must be at least 1".into()));
    }
    config.validate()?;

    if diag.is_constant() {
        let params = QaoaParams::zeros(reps);
        let value = objective(diag, &params, config.mode, config.seed)?;
        return Ok(Optimized {
            restarts: vec![RestartRecord {
                restart: 0,
                seed: config.seed,
                initial: params.clone(),
                final_value: value,
                evaluations: 1,
                converged: true,
            }],
            params,
            value,
            evaluations: 1,
        });
    }

    let search = NelderMead {
        max_evaluations: config.evaluation_budget(reps),
        tolerance: config.tolerance,
        initial_step: config.initial_step,
    };
    let runs: Vec<(RestartRecord, QaoaParams)> = (0..config.restarts)
        .into_par_iter()
        .map(|restart| {
            let seed = derive_seed(config.seed, restart as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let initial = QaoaParams::random(reps, &mut rng);
            let mut calls = 0u64;
            let found = search.minimize(
                |x| {
                    calls += 1;
                    objective(diag, &QaoaParams::from_vector(x), config.mode, derive_seed(seed, calls))
                        .unwrap_or(f64::INFINITY)
                },
                &initial.to_vector(),
            );
            let record = RestartRecord {
                restart,
                seed,
                initial,
                final_value: found.value,
                evaluations: found.evaluations,
                converged: found.converged,
            };
            (record, QaoaParams::from_vector(&found.point))
        })
        .collect();

    let evaluations = runs.iter().map(|(r, _)| r.evaluations).sum();
    let (best_record, best_params) = runs
        .iter()
        .min_by(|a, b| a.0.final_value.total_cmp(&b.0.final_value))
        .expect("at least one restart");
    Ok(Optimized {
        params: best_params.clone(),
        value: best_record.final_value,
        evaluations,
        restarts: runs.into_iter().map(|(r, _)| r).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub p_best: f64,
    pub p_adm: f64,
}

/// Fractions of shots landing in `optimal` and in `admissible`.
pub fn compute_metrics(counts: &Counts, optimal: &BTreeSet<u64>, admissible: &BTreeSet<u64>) -> Result<Metrics> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    if let Some(bad) = optimal.iter().find(|b| !admissible.contains(b)) {
        return Err(Error::OptimalNotAdmissible(format!("{bad:#b}")));
    }
    let count_in = |set: &BTreeSet<u64>| -> u64 {
        counts
            .iter()
            .filter(|(b, _)| set.contains(b))
            .map(|(_, c)| c)
            .sum()
    };
    Ok(Metrics {
        p_best: count_in(optimal) as f64 / total as f64,
        p_adm: count_in(admissible) as f64 / total as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QaoaResult {
    pub num_qubits: usize,
    pub reps: usize,
    pub params: QaoaParams,
    pub objective: f64,
    pub evaluations: usize,
    pub shots: u64,
    pub sample_seed: u64,
    /// Bitstring (qubit 1 first) to count.
    pub counts: BTreeMap<String, u64>,
    pub p_best: f64,
    pub p_adm: f64,
    pub restarts: Vec<RestartRecord>,
    #[serde(skip)]
    pub wall_time_ms: f64,
}

impl QaoaResult {
    /// Most frequent bitstring, smallest on ties.
    pub fn mode_bitstring(&self) -> Option<&str> {
        self.counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(s, _)| s.as_str())
    }
}

/// Optimizes, samples the final state with `shots`, and scores the samples
/// against the instance oracle.
pub fn run_qaoa(instance: &Instance, reps: usize, shots: u64, config: &OptimizerConfig) -> Result<QaoaResult> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let start = Instant::now();
    let found = optimize_diagonal(&instance.diag, reps, config)?;
    let state = ansatz_state(&instance.diag, &found.params)?;
    let sample_seed = derive_seed(config.seed, SAMPLE_STREAM);
    let counts = state.sample(shots, sample_seed);
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    let admissible: BTreeSet<u64> = counts
        .keys()
        .chain(instance.optimal_set())
        .copied()
        .filter(|&b| instance.is_admissible(b))
        .collect();
    let metrics = compute_metrics(&counts, instance.optimal_set(), &admissible)?;
    let n = instance.num_qubits();
    Ok(QaoaResult {
        num_qubits: n,
        reps,
        params: found.params,
        objective: found.value,
        evaluations: found.evaluations,
        shots,
        sample_seed,
        counts: counts
            .iter()
            .map(|(&b, &c)| (basis::index_to_bitstring(b, n), c))
            .collect(),
        p_best: metrics.p_best,
        p_adm: metrics.p_adm,
        restarts: found.restarts,
        wall_time_ms,
    })
}
