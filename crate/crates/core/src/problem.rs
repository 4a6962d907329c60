//! Prosumer scheduling instances: loads with fixed power draw and working time,
//! per-user power limits, and hourly prices.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::basis;
use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// Default cap on the number of schedule bits explored by exhaustive search.
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Load {
    /// Power draw in kW while on.
    pub energy: i64,
    /// Number of hours the load must be on.
    pub working_time: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct User {
    /// Maximum power available to the user in any hour, kW.
    pub e_max: i64,
    pub loads: Vec<Load>,
}

impl User {
    pub fn total_energy(&self) -> i64 {
        self.loads.iter().map(|l| l.energy).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProsumerProblem {
    pub hours: usize,
    /// Price of one kWh at each hour, in euro cents.
    pub prices: Vec<i64>,
    pub users: Vec<User>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoHours,
    PriceCount { expected: usize, found: usize },
    NegativePrice { hour: usize, price: i64 },
    NoUsers,
    NonPositiveEmax { user: usize, e_max: i64 },
    NoLoads { user: usize },
    NonPositiveEnergy { user: usize, load: usize, energy: i64 },
    NonPositiveWorkingTime { user: usize, load: usize, working_time: i64 },
    WorkingTimeExceedsHours { user: usize, load: usize, working_time: i64, hours: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoHours => write!(f, "hours must be at least 1"),
            Violation::PriceCount { expected, found } => {
                write!(f, "expected {expected} prices, found {found}")
            }
            Violation::NegativePrice { hour, price } => {
                write!(f, "price at hour {hour} is negative ({price})")
            }
            Violation::NoUsers => write!(f, "problem has no users"),
            Violation::NonPositiveEmax { user, e_max } => {
                write!(f, "user {user}: e_max must be at least 1 (got {e_max})")
            }
            Violation::NoLoads { user } => write!(f, "user {user} has no loads"),
            Violation::NonPositiveEnergy { user, load, energy } => {
                write!(f, "user {user} load {load}: energy must be at least 1 (got {energy})")
            }
            Violation::NonPositiveWorkingTime { user, load, working_time } => write!(
                f,
                "user {user} load {load}: working_time must be at least 1 (got {working_time})"
            ),
            Violation::WorkingTimeExceedsHours { user, load, working_time, hours } => write!(
                f,
                "user {user} load {load}: working_time exceeds hours ({working_time} > {hours})"
            ),
        }
    }
}

/// On/off state of every load at every hour, flattened in canonical
/// (user, load, hour) order with the hour varying fastest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Schedule {
    hours: usize,
    loads_per_user: Vec<usize>,
    bits: Vec<bool>,
}

impl Schedule {
    pub fn off(problem: &ProsumerProblem) -> Self {
        Self::off_with_shape(problem.hours, problem.loads_per_user())
    }

    pub(crate) fn off_with_shape(hours: usize, loads_per_user: Vec<usize>) -> Self {
        let total = hours * loads_per_user.iter().sum::<usize>();
        Self {
            hours,
            loads_per_user,
            bits: vec![false; total],
        }
    }

    pub fn from_bits(problem: &ProsumerProblem, bits: Vec<bool>) -> Result<Self> {
        Self::from_bits_with_shape(problem.hours, problem.loads_per_user(), bits)
    }

    pub(crate) fn from_bits_with_shape(
        hours: usize,
        loads_per_user: Vec<usize>,
        bits: Vec<bool>,
    ) -> Result<Self> {
        let expected = hours * loads_per_user.iter().sum::<usize>();
        if bits.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: bits.len(),
            });
        }
        Ok(Self {
            hours,
            loads_per_user,
            bits,
        })
    }

    pub fn from_bitstring(problem: &ProsumerProblem, s: &str) -> Result<Self> {
        let bits = basis::parse_bitstring(s)
            .ok_or_else(|| Error::InvalidArgument(format!("not a bitstring: {s:?}")))?;
        Self::from_bits(problem, bits)
    }

    pub fn hours(&self) -> usize {
        self.hours
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn to_bitstring(&self) -> String {
        basis::bits_to_string(&self.bits)
    }

    fn offset(&self, user: usize, load: usize, hour: usize) -> usize {
        assert!(load < self.loads_per_user[user] && hour < self.hours);
        let before: usize = self.loads_per_user[..user].iter().sum();
        (before + load) * self.hours + hour
    }

    pub fn get(&self, user: usize, load: usize, hour: usize) -> bool {
        self.bits[self.offset(user, load, hour)]
    }

    pub fn set(&mut self, user: usize, load: usize, hour: usize, on: bool) {
        let at = self.offset(user, load, hour);
        self.bits[at] = on;
    }

    fn matches(&self, problem: &ProsumerProblem) -> Result<()> {
        let expected = problem.num_schedule_bits();
        if self.hours != problem.hours || self.loads_per_user != problem.loads_per_user() {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.bits.len(),
            });
        }
        Ok(())
    }
}

/// A constraint broken by a schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintViolation {
    /// Power drawn by a user in one hour exceeds its `e_max`.
    PowerLimit { user: usize, hour: usize, drawn: i64, e_max: i64 },
    /// A load is on for a number of hours different from its working time.
    WorkingTime { user: usize, load: usize, on_hours: i64, required: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Admissibility {
    pub violations: Vec<ConstraintViolation>,
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoredSchedule {
    pub schedule: Schedule,
    pub cost: Rational,
}

impl ProsumerProblem {
    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    pub fn loads_per_user(&self) -> Vec<usize> {
        self.users.iter().map(|u| u.loads.len()).collect()
    }

    pub fn num_loads(&self) -> usize {
        self.users.iter().map(|u| u.loads.len()).sum()
    }

    /// Number of load state bits, `H * sum_u L_u`.
    pub fn num_schedule_bits(&self) -> usize {
        self.hours * self.num_loads()
    }

    /// Iterates `(user, load_index, load)` in canonical order.
    pub fn loads(&self) -> impl Iterator<Item = (usize, usize, &Load)> {
        self.users
            .iter()
            .enumerate()
            .flat_map(|(u, user)| user.loads.iter().enumerate().map(move |(l, load)| (u, l, load)))
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.hours == 0 {
            out.push(Violation::NoHours);
        }
        if self.prices.len() != self.hours {
            out.push(Violation::PriceCount {
                expected: self.hours,
                found: self.prices.len(),
            });
        }
        for (hour, &price) in self.prices.iter().enumerate() {
            if price < 0 {
                out.push(Violation::NegativePrice { hour, price });
            }
        }
        if self.users.is_empty() {
            out.push(Violation::NoUsers);
        }
        for (u, user) in self.users.iter().enumerate() {
            if user.e_max < 1 {
                out.push(Violation::NonPositiveEmax { user: u, e_max: user.e_max });
            }
            if user.loads.is_empty() {
                out.push(Violation::NoLoads { user: u });
            }
            for (l, load) in user.loads.iter().enumerate() {
                if load.energy < 1 {
                    out.push(Violation::NonPositiveEnergy { user: u, load: l, energy: load.energy });
                }
                if load.working_time < 1 {
                    out.push(Violation::NonPositiveWorkingTime {
                        user: u,
                        load: l,
                        working_time: load.working_time,
                    });
                } else if load.working_time as u64 > self.hours as u64 {
                    out.push(Violation::WorkingTimeExceedsHours {
                        user: u,
                        load: l,
                        working_time: load.working_time,
                        hours: self.hours,
                    });
                }
            }
        }
        out
    }

    /// Fails with [`Error::InvalidProblem`] when [`validate`](Self::validate) reports anything.
    pub fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidProblem(violations.iter().map(|v| v.to_string()).collect()))
        }
    }

    /// Energy cost of a schedule: `sum_h p^h * sum_{u,l} E_l * x_l^h`.
    pub fn schedule_cost(&self, schedule: &Schedule) -> Result<Rational> {
        schedule.matches(self)?;
        let mut cost = 0i64;
        for (u, l, load) in self.loads() {
            for (h, &price) in self.prices.iter().enumerate().take(self.hours) {
                if schedule.get(u, l, h) {
                    cost += price * load.energy;
                }
            }
        }
        Ok(int(cost))
    }

    pub fn check_schedule(&self, schedule: &Schedule) -> Result<Admissibility> {
        schedule.matches(self)?;
        let mut violations = Vec::new();
        for (u, user) in self.users.iter().enumerate() {
            for h in 0..self.hours {
                let drawn: i64 = user
                    .loads
                    .iter()
                    .enumerate()
                    .filter(|(l, _)| schedule.get(u, *l, h))
                    .map(|(_, load)| load.energy)
                    .sum();
                if drawn > user.e_max {
                    violations.push(ConstraintViolation::PowerLimit {
                        user: u,
                        hour: h,
                        drawn,
                        e_max: user.e_max,
                    });
                }
            }
        }
        for (u, l, load) in self.loads() {
            let on_hours = (0..self.hours).filter(|&h| schedule.get(u, l, h)).count() as i64;
            if on_hours != load.working_time {
                violations.push(ConstraintViolation::WorkingTime {
                    user: u,
                    load: l,
                    on_hours,
                    required: load.working_time,
                });
            }
        }
        Ok(Admissibility { violations })
    }

    pub fn is_admissible(&self, schedule: &Schedule) -> Result<bool> {
        Ok(self.check_schedule(schedule)?.is_admissible())
    }

    /// Every admissible schedule with its cost, cheapest first, ties broken by
    /// lexicographically smallest bitstring.
    pub fn enumerate_admissible(&self, limit: usize) -> Result<Vec<ScoredSchedule>> {
        let bits = self.num_schedule_bits();
        if bits > limit {
            return Err(Error::LimitExceeded {
                what: "schedule",
                size: bits,
                limit,
            });
        }
        let loads: Vec<(usize, usize, &Load)> = self.loads().collect();
        if loads.iter().any(|(_, _, load)| load.working_time < 0 || load.working_time as usize > self.hours) {
            return Ok(Vec::new());
        }
        // Candidate on-hour sets per load, each exactly `working_time` hours.
        let candidates: Vec<Vec<Vec<usize>>> = loads
            .iter()
            .map(|(_, _, load)| combinations(self.hours, load.working_time as usize))
            .collect();

        let mut found = Vec::new();
        let mut drawn = vec![vec![0i64; self.hours]; self.users.len()];
        let mut current = Schedule::off(self);
        self.extend_admissible(&loads, &candidates, 0, &mut drawn, &mut current, &mut found)?;
        found.sort_by(|a: &ScoredSchedule, b| {
            a.cost
                .cmp(&b.cost)
                .then_with(|| a.schedule.bits.cmp(&b.schedule.bits))
        });
        Ok(found)
    }

    fn extend_admissible(
        &self,
        loads: &[(usize, usize, &Load)],
        candidates: &[Vec<Vec<usize>>],
        depth: usize,
        drawn: &mut [Vec<i64>],
        current: &mut Schedule,
        found: &mut Vec<ScoredSchedule>,
    ) -> Result<()> {
        if depth == loads.len() {
            let cost = self.schedule_cost(current)?;
            found.push(ScoredSchedule {
                schedule: current.clone(),
                cost,
            });
            return Ok(());
        }
        let (u, l, load) = loads[depth];
        let e_max = self.users[u].e_max;
        for hours in &candidates[depth] {
            if hours.iter().any(|&h| drawn[u][h] + load.energy > e_max) {
                continue;
            }
            for &h in hours {
                drawn[u][h] += load.energy;
                current.set(u, l, h, true);
            }
            self.extend_admissible(loads, candidates, depth + 1, drawn, current, found)?;
            for &h in hours {
                drawn[u][h] -= load.energy;
                current.set(u, l, h, false);
            }
        }
        Ok(())
    }

    /// Minimum cost and every schedule attaining it.
    pub fn optimal_schedules(&self, limit: usize) -> Result<(Rational, Vec<Schedule>)> {
        let all = self.enumerate_admissible(limit)?;
        let best = all.first().ok_or(Error::NoAdmissibleSchedule)?.cost;
        let schedules = all
            .into_iter()
            .take_while(|s| s.cost == best)
            .map(|s| s.schedule)
            .collect();
        Ok((best, schedules))
    }
}

/// All `k`-element subsets of `0..n`, each ascending, in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}
