//! Compilation of a [`ProsumerProblem`] into a penalized QUBO and the equivalent
//! Ising spin model.
//!
//! Power-limit inequalities become equalities through per-(user, hour) residual
//! integers, each encoded with slack bits. Users whose loads can never exceed
//! their limit get no slack bits and no power-limit penalty. Both constraint
//! families are squared and scaled by `A = 1 + C_up - C_low`, which exceeds the
//! spread of the objective so any violation outweighs any saving.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::basis;
use crate::error::{Error, Result};
use crate::problem::{ProsumerProblem, Schedule};
use crate::rational::{int, Rational};

/// One binary variable of the compiled model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Variable {
    Load { user: usize, load: usize, hour: usize },
    Slack { user: usize, hour: usize, bit: usize, weight: i64 },
}

/// Bijection between compiled variable indices and problem quantities. Load
/// variables come first in canonical order, then slack bits grouped by
/// (user, hour) with the bit index ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableRegistry {
    entries: Vec<Variable>,
    hours: usize,
    loads_per_user: Vec<usize>,
    slack_weights: Vec<Vec<i64>>,
    e_max: Vec<i64>,
}

/// Slack weights for a residual in `0..=e_max`: bits `1..M-1` weigh
/// `2^(m-1)` and the last bit weighs `N_res - 2^(M-1)`, with `N_res = e_max + 1`
/// and `M = ceil(log2 N_res)`.
pub fn slack_weights(e_max: i64) -> Vec<i64> {
    assert!(e_max >= 1, "slack encoding needs e_max >= 1");
    let n_res = e_max + 1;
    let m = 64 - (n_res - 1).leading_zeros() as i64; // ceil(log2 n_res) for n_res >= 2
    let mut weights: Vec<i64> = (1..m).map(|k| 1i64 << (k - 1)).collect();
    weights.push(n_res - (1i64 << (m - 1)));
    weights
}

impl VariableRegistry {
    pub fn build(problem: &ProsumerProblem) -> Self {
        let mut entries = Vec::new();
        for (user, load, _) in problem.loads() {
            for hour in 0..problem.hours {
                entries.push(Variable::Load { user, load, hour });
            }
        }
        let slack: Vec<Vec<i64>> = problem
            .users
            .iter()
            .map(|u| {
                if u.total_energy() > u.e_max {
                    slack_weights(u.e_max)
                } else {
                    Vec::new()
                }
            })
            .collect();
        for (user, weights) in slack.iter().enumerate() {
            for hour in 0..problem.hours {
                for (bit, &weight) in weights.iter().enumerate() {
                    entries.push(Variable::Slack { user, hour, bit, weight });
                }
            }
        }
        Self {
            entries,
            hours: problem.hours,
            loads_per_user: problem.loads_per_user(),
            slack_weights: slack,
            e_max: problem.users.iter().map(|u| u.e_max).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Variable] {
        &self.entries
    }

    pub fn num_load_vars(&self) -> usize {
        self.hours * self.loads_per_user.iter().sum::<usize>()
    }

    pub fn has_slack(&self, user: usize) -> bool {
        !self.slack_weights[user].is_empty()
    }

    pub fn user_slack_weights(&self, user: usize) -> &[i64] {
        &self.slack_weights[user]
    }

    pub fn load_index(&self, user: usize, load: usize, hour: usize) -> usize {
        let before: usize = self.loads_per_user[..user].iter().sum();
        (before + load) * self.hours + hour
    }

    pub fn slack_index(&self, user: usize, hour: usize, bit: usize) -> usize {
        let before: usize = (0..user)
            .map(|u| self.slack_weights[u].len() * self.hours)
            .sum();
        self.num_load_vars() + before + hour * self.slack_weights[user].len() + bit
    }

    pub fn decode(&self, bits: &[bool]) -> Result<DecodedSolution> {
        if bits.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: bits.len(),
            });
        }
        let n_load = self.num_load_vars();
        let schedule = Schedule::from_bits_with_shape(
            self.hours,
            self.loads_per_user.clone(),
            bits[..n_load].to_vec(),
        )?;
        let mut residuals = Vec::new();
        for (user, weights) in self.slack_weights.iter().enumerate() {
            if weights.is_empty() {
                continue;
            }
            for hour in 0..self.hours {
                let value = weights
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| bits[self.slack_index(user, hour, *bit)])
                    .map(|(_, w)| w)
                    .sum();
                residuals.push(Residual { user, hour, value });
            }
        }
        Ok(DecodedSolution {
            schedule,
            slack_bits: bits[n_load..].to_vec(),
            residuals,
        })
    }

    pub fn decode_index(&self, index: u64) -> Result<DecodedSolution> {
        self.decode(&basis::index_to_bits(index, self.len()))
    }

    /// Inverse of [`decode`](Self::decode).
    pub fn encode(&self, schedule: &Schedule, slack_bits: &[bool]) -> Result<Vec<bool>> {
        let n_slack = self.len() - self.num_load_vars();
        if schedule.bits().len() != self.num_load_vars() || schedule.hours() != self.hours {
            return Err(Error::DimensionMismatch {
                expected: self.num_load_vars(),
                found: schedule.bits().len(),
            });
        }
        if slack_bits.len() != n_slack {
            return Err(Error::DimensionMismatch {
                expected: n_slack,
                found: slack_bits.len(),
            });
        }
        let mut bits = schedule.bits().to_vec();
        bits.extend_from_slice(slack_bits);
        Ok(bits)
    }

    /// Slack bits that make every power-limit equality hold exactly for
    /// `schedule`, or `None` if some user draws more than `e_max`.
    pub fn consistent_slack(&self, problem: &ProsumerProblem, schedule: &Schedule) -> Option<Vec<bool>> {
        let mut slack = vec![false; self.len() - self.num_load_vars()];
        let n_load = self.num_load_vars();
        for (user, weights) in self.slack_weights.iter().enumerate() {
            if weights.is_empty() {
                continue;
            }
            let last = weights.len() - 1;
            for hour in 0..self.hours {
                let drawn: i64 = problem.users[user]
                    .loads
                    .iter()
                    .enumerate()
                    .filter(|(l, _)| schedule.get(user, *l, hour))
                    .map(|(_, load)| load.energy)
                    .sum();
                let mut rest = self.e_max[user] - drawn;
                if rest < 0 {
                    return None;
                }
                // Low bits cover 0..2^(M-1)-1; the top bit covers the remainder.
                if rest > (1i64 << last) - 1 {
                    slack[self.slack_index(user, hour, last) - n_load] = true;
                    rest -= weights[last];
                }
                for bit in 0..last {
                    if (rest >> bit) & 1 == 1 {
                        slack[self.slack_index(user, hour, bit) - n_load] = true;
                    }
                }
            }
        }
        Some(slack)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Residual {
    pub user: usize,
    pub hour: usize,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedSolution {
    pub schedule: Schedule,
    pub slack_bits: Vec<bool>,
    /// Unused power per (user, hour) for users carrying slack bits.
    pub residuals: Vec<Residual>,
}

/// `constant + sum_i linear_i x_i + sum_{i<j} quadratic_ij x_i x_j` over binary `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticBinaryModel {
    pub num_vars: usize,
    pub linear: BTreeMap<usize, Rational>,
    pub quadratic: BTreeMap<(usize, usize), Rational>,
    pub constant: Rational,
    /// Penalty multiplier used when the model was compiled; zero for hand-built models.
    pub penalty: Rational,
}

impl QuadraticBinaryModel {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
            constant: Rational::zero(),
            penalty: Rational::zero(),
        }
    }

    pub fn add_linear(&mut self, i: usize, coeff: Rational) {
        assert!(i < self.num_vars);
        add_entry(&mut self.linear, i, coeff);
    }

    /// `x_i x_i` folds into the linear term since `x^2 = x`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, coeff: Rational) {
        assert!(i < self.num_vars && j < self.num_vars);
        if i == j {
            self.add_linear(i, coeff);
        } else {
            add_entry(&mut self.quadratic, (i.min(j), i.max(j)), coeff);
        }
    }

    pub fn add_constant(&mut self, c: Rational) {
        self.constant += c;
    }

    /// Adds `scale * (sum_k w_k x_k + shift)^2`.
    pub fn add_squared(&mut self, terms: &[(usize, Rational)], shift: Rational, scale: Rational) {
        for (a, &(i, wi)) in terms.iter().enumerate() {
            self.add_linear(i, scale * (wi * wi + int(2) * wi * shift));
            for &(j, wj) in &terms[a + 1..] {
                self.add_quadratic(i, j, scale * int(2) * wi * wj);
            }
        }
        self.add_constant(scale * shift * shift);
    }

    pub fn value(&self, bits: &[bool]) -> Result<Rational> {
        if bits.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                found: bits.len(),
            });
        }
        let mut v = self.constant;
        for (&i, c) in &self.linear {
            if bits[i] {
                v += c;
            }
        }
        for (&(i, j), c) in &self.quadratic {
            if bits[i] && bits[j] {
                v += c;
            }
        }
        Ok(v)
    }
}

fn add_entry<K: Ord>(map: &mut BTreeMap<K, Rational>, key: K, coeff: Rational) {
    if coeff.is_zero() {
        return;
    }
    match map.entry(key) {
        Entry::Vacant(slot) => {
            slot.insert(coeff);
        }
        Entry::Occupied(mut slot) => {
            *slot.get_mut() += coeff;
            if slot.get().is_zero() {
                slot.remove();
            }
        }
    }
}

/// `offset + sum_i linear_i z_i + sum_{i<j} quadratic_ij z_i z_j` over spins `z = ±1`.
///
/// In the usual Ising notation `min sum h_i z_i - sum J_ij z_i z_j`, `linear_i = h_i`
/// and `quadratic_ij = -J_ij`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinModel {
    pub num_vars: usize,
    pub linear: Vec<Rational>,
    pub quadratic: BTreeMap<(usize, usize), Rational>,
    pub offset: Rational,
}

impl SpinModel {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            linear: vec![Rational::zero(); num_vars],
            quadratic: BTreeMap::new(),
            offset: Rational::zero(),
        }
    }

    pub fn add_linear(&mut self, i: usize, coeff: Rational) {
        self.linear[i] += coeff;
    }

    /// `z_i z_i = 1`, so a diagonal pair lands in the offset.
    pub fn add_quadratic(&mut self, i: usize, j: usize, coeff: Rational) {
        assert!(i < self.num_vars && j < self.num_vars);
        if i == j {
            self.offset += coeff;
        } else {
            add_entry(&mut self.quadratic, (i.min(j), i.max(j)), coeff);
        }
    }

    pub fn quadratic_coeff(&self, i: usize, j: usize) -> Rational {
        self.quadratic
            .get(&(i.min(j), i.max(j)))
            .copied()
            .unwrap_or_else(Rational::zero)
    }

    /// True when every linear and quadratic coefficient is zero.
    pub fn is_constant(&self) -> bool {
        self.quadratic.is_empty() && self.linear.iter().all(|a| a.is_zero())
    }

    pub fn energy(&self, spins: &[i8]) -> Result<Rational> {
        if spins.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                found: spins.len(),
            });
        }
        if let Some(&bad) = spins.iter().find(|&&z| z != 1 && z != -1) {
            return Err(Error::InvalidArgument(format!("spin value {bad} is not ±1")));
        }
        let mut e = self.offset;
        for (a, &z) in self.linear.iter().zip(spins) {
            if z > 0 {
                e += a;
            } else {
                e -= a;
            }
        }
        for (&(i, j), b) in &self.quadratic {
            if spins[i] == spins[j] {
                e += b;
            } else {
                e -= b;
            }
        }
        Ok(e)
    }

    /// Energy of a basis index under the shared bit/spin convention.
    pub fn energy_of_index(&self, index: u64) -> Rational {
        self.energy(&basis::index_to_spins(index, self.num_vars))
            .expect("index-derived spins have the right length")
    }
}

/// `A = 1 + C_up - C_low` where `C_up` is the cost with every load on at every
/// hour and `C_low` the cost with everything off.
pub fn penalty_coefficient(problem: &ProsumerProblem) -> Rational {
    let c_up: i64 = problem
        .prices
        .iter()
        .map(|p| p * problem.loads().map(|(_, _, l)| l.energy).sum::<i64>())
        .sum();
    let c_low = 0i64;
    int(1 + c_up - c_low)
}

pub fn build_qubo(problem: &ProsumerProblem) -> Result<(QuadraticBinaryModel, VariableRegistry)> {
    problem.ensure_valid()?;
    let registry = VariableRegistry::build(problem);
    let a = penalty_coefficient(problem);
    let mut model = QuadraticBinaryModel::new(registry.len());
    model.penalty = a;

    for (u, l, load) in problem.loads() {
        for (h, &price) in problem.prices.iter().enumerate() {
            model.add_linear(registry.load_index(u, l, h), int(price * load.energy));
        }
    }

    for (u, user) in problem.users.iter().enumerate() {
        if !registry.has_slack(u) {
            continue;
        }
        for h in 0..problem.hours {
            let mut terms: Vec<(usize, Rational)> = user
                .loads
                .iter()
                .enumerate()
                .map(|(l, load)| (registry.load_index(u, l, h), int(load.energy)))
                .collect();
            for (bit, &w) in registry.user_slack_weights(u).iter().enumerate() {
                terms.push((registry.slack_index(u, h, bit), int(w)));
            }
            model.add_squared(&terms, int(-user.e_max), a);
        }
    }

    for (u, l, load) in problem.loads() {
        let terms: Vec<(usize, Rational)> = (0..problem.hours)
            .map(|h| (registry.load_index(u, l, h), int(1)))
            .collect();
        model.add_squared(&terms, int(-load.working_time), a);
    }

    Ok((model, registry))
}

/// Substitutes `x = (1 - z) / 2`; the resulting energy equals the QUBO value at
/// every assignment, constants included.
pub fn qubo_to_spin(model: &QuadraticBinaryModel) -> SpinModel {
    let half = Rational::new(1, 2);
    let quarter = Rational::new(1, 4);
    let mut spin = SpinModel::new(model.num_vars);
    spin.offset = model.constant;
    for (&i, &c) in &model.linear {
        spin.offset += c * half;
        spin.add_linear(i, -c * half);
    }
    for (&(i, j), &q) in &model.quadratic {
        spin.offset += q * quarter;
        spin.add_linear(i, -q * quarter);
        spin.add_linear(j, -q * quarter);
        spin.add_quadratic(i, j, q * quarter);
    }
    spin
}
