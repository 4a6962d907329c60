//! Recursive QAOA: optimize QAOA on the current model, fix the pair with the
//! strongest `⟨Z_i Z_j⟩` correlation as `z_j = σ z_i`, shrink, and repeat until
//! `num_min_var` variables remain; the remainder is solved exhaustively and the
//! eliminated spins are recovered by back-substitution.

use num_traits::Zero;
use serde::Serialize;

use crate::basis;
use crate::bruteforce::{self, DEFAULT_DIAGONAL_LIMIT};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::qaoa::{self, OptimizerConfig, QaoaParams};
use crate::rational::{to_f64, Rational};
use crate::seed::derive_seed;
use crate::simulator::{CostDiagonal, Statevector};
use crate::transform::SpinModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelatedEdge {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

impl CorrelatedEdge {
    pub fn sign(&self) -> i8 {
        if self.value >= 0.0 {
            1
        } else {
            -1
        }
    }
}

/// Among pairs with a nonzero coupling, the one with the largest `|⟨Z_i Z_j⟩|`;
/// the lexicographically smallest `(i, j)` wins ties.
pub fn max_correlation_edge(state: &Statevector, model: &SpinModel) -> Result<CorrelatedEdge> {
    if state.num_qubits() != model.num_vars {
        return Err(Error::DimensionMismatch {
            expected: model.num_vars,
            found: state.num_qubits(),
        });
    }
    let mut best: Option<CorrelatedEdge> = None;
    // BTreeMap iteration is already lexicographic, so only a strictly larger
    // magnitude replaces the incumbent.
    for &(i, j) in model.quadratic.keys() {
        let value = state.zz_expectation(i, j)?;
        if best.is_none_or(|b| value.abs() > b.value.abs()) {
            best = Some(CorrelatedEdge { i, j, value });
        }
    }
    best.ok_or(Error::NoQuadraticTerms)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub model: SpinModel,
    /// `new_index[k]` is the index of old variable `k` in the reduced model;
    /// `None` for the removed variable.
    pub new_index: Vec<Option<usize>>,
}

/// Imposes `z_j = sign * z_i` and removes `j`. For every assignment obeying the
/// constraint, the reduced energy equals the original energy exactly.
pub fn eliminate(model: &SpinModel, i: usize, j: usize, sign: i8) -> Result<Reduction> {
    let n = model.num_vars;
    for q in [i, j] {
        if q >= n {
            return Err(Error::IndexOutOfRange { index: q, num_vars: n });
        }
    }
    if i == j {
        return Err(Error::InvalidArgument(format!("cannot eliminate variable {j} onto itself")));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidArgument(format!("sign must be ±1, got {sign}")));
    }
    let s = Rational::from_integer(sign as i64);
    let new_index: Vec<Option<usize>> = (0..n)
        .map(|k| match k.cmp(&j) {
            std::cmp::Ordering::Less => Some(k),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(k - 1),
        })
        .collect();
    let map = |k: usize| new_index[k].expect("surviving variable");

    let mut reduced = SpinModel::new(n - 1);
    reduced.offset = model.offset;
    for (k, &a) in model.linear.iter().enumerate() {
        if k == j {
            reduced.add_linear(map(i), s * a);
        } else {
            reduced.add_linear(map(k), a);
        }
    }
    for (&(p, q), &b) in &model.quadratic {
        // Replace z_j by s z_i in the pair; (i, j) itself becomes s b z_i^2 = s b.
        let p2 = if p == j { i } else { p };
        let q2 = if q == j { i } else { q };
        let coeff = if p == j || q == j { s * b } else { b };
        reduced.add_quadratic(map(p2), map(q2), coeff);
    }
    Ok(Reduction { model: reduced, new_index })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EliminationStep {
    /// Indices in the model of the level the step was taken at.
    pub kept: usize,
    pub removed: usize,
    /// Same pair as indices of the original model.
    pub kept_original: usize,
    pub removed_original: usize,
    pub sign: i8,
    pub correlation: f64,
    /// Set when the chosen correlation was exactly zero and `+1` was used.
    pub zero_correlation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelResult {
    pub num_vars: usize,
    pub params: QaoaParams,
    pub objective: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RqaoaOutcome {
    /// Final assignment over all original variables, qubit 1 first.
    pub bitstring: String,
    #[serde(skip)]
    pub index: u64,
    #[serde(serialize_with = "serialize_rational")]
    pub energy: Rational,
    pub trace: Vec<EliminationStep>,
    pub levels: Vec<LevelResult>,
    #[serde(serialize_with = "serialize_rational")]
    pub reduced_ground_energy: Rational,
    /// Set when the couplings vanished before `num_min_var` was reached.
    pub finished_early: bool,
}

fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::rational::to_decimal_string(r))
}

/// Runs the recursion on a bare spin model.
///
/// Level `k` optimizes with seed `derive_seed(config.seed, k)` from fresh restarts.
pub fn solve(model: &SpinModel, num_min_var: usize, reps: usize, config: &OptimizerConfig) -> Result<RqaoaOutcome> {
    let n = model.num_vars;
    if num_min_var == 0 || num_min_var >= n {
        return Err(Error::InvalidArgument(format!(
            "num_min_var must be in 1..{n}, got {num_min_var}"
        )));
    }
    let mut current = model.clone();
    // original[k]: original index of current variable k
    let mut original: Vec<usize> = (0..n).collect();
    let mut trace = Vec::new();
    let mut levels = Vec::new();
    let mut finished_early = false;

    while current.num_vars > num_min_var {
        if current.quadratic.is_empty() {
            finished_early = true;
            break;
        }
        let spectrum = bruteforce::diagonal(&current, DEFAULT_DIAGONAL_LIMIT)?;
        let diag = CostDiagonal::from(&spectrum);
        let level_cfg = OptimizerConfig {
            seed: derive_seed(config.seed, levels.len() as u64),
            ..config.clone()
        };
        let found = qaoa::optimize_diagonal(&diag, reps, &level_cfg)?;
        let state = qaoa::ansatz_state(&diag, &found.params)?;
        let edge = max_correlation_edge(&state, &current)?;
        levels.push(LevelResult {
            num_vars: current.num_vars,
            params: found.params,
            objective: found.value,
            evaluations: found.evaluations,
        });
        let sign = edge.sign();
        trace.push(EliminationStep {
            kept: edge.i,
            removed: edge.j,
            kept_original: original[edge.i],
            removed_original: original[edge.j],
            sign,
            correlation: edge.value,
            zero_correlation: edge.value == 0.0,
        });
        current = eliminate(&current, edge.i, edge.j, sign)?.model;
        original.remove(edge.j);
    }

    // Ties resolve to the smallest index, so a decoupled spin with zero field
    // lands on +1 and otherwise opposes its field.
    let ground = bruteforce::ground_states(&current, DEFAULT_DIAGONAL_LIMIT)?;
    let reduced_index = ground.states[0];
    let mut spins = vec![0i8; n];
    for (k, z) in basis::index_to_spins(reduced_index, current.num_vars).into_iter().enumerate() {
        spins[original[k]] = z;
    }
    for step in trace.iter().rev() {
        spins[step.removed_original] = step.sign * spins[step.kept_original];
    }
    debug_assert!(spins.iter().all(|&z| z == 1 || z == -1));
    let energy = model.energy(&spins)?;
    let index = basis::spins_to_index(&spins);
    Ok(RqaoaOutcome {
        bitstring: basis::index_to_bitstring(index, n),
        index,
        energy,
        trace,
        levels,
        reduced_ground_energy: ground.energy,
        finished_early,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RqaoaResult {
    pub num_qubits: usize,
    pub num_min_var: usize,
    pub reps: usize,
    #[serde(flatten)]
    pub outcome: RqaoaOutcome,
    pub admissible: bool,
    pub optimal: bool,
    pub energy_value: f64,
    #[serde(skip)]
    pub wall_time_ms: f64,
}

pub fn run_rqaoa(instance: &Instance, num_min_var: usize, reps: usize, config: &OptimizerConfig) -> Result<RqaoaResult> {
    let start = std::time::Instant::now();
    let outcome = solve(&instance.spin, num_min_var, reps, config)?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(RqaoaResult {
        num_qubits: instance.num_qubits(),
        num_min_var,
        reps,
        admissible: instance.is_admissible(outcome.index),
        optimal: instance.is_optimal(outcome.index),
        energy_value: to_f64(&outcome.energy),
        outcome,
        wall_time_ms,
    })
}

impl RqaoaOutcome {
    /// The back-substituted assignment must have exactly the reduced ground
    /// energy, since eliminated couplings were folded into the reduced offset.
    pub fn is_consistent(&self) -> bool {
        (self.energy - self.reduced_ground_energy).is_zero()
    }
}
