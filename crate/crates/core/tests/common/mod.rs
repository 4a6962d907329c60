//! Independent reference computations for the integration tests. Nothing here
//! calls into the library beyond its data types.

#![allow(dead_code)]

pub mod dense;

use prosumer_qaoa::rational::{int, Rational};
use prosumer_qaoa::transform;
use prosumer_qaoa::{Load, ProsumerProblem, User};
use proptest::prelude::*;

pub fn fixture_path(hours: usize) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("fixtures/h{hours}.json"))
}

/// Two users, one of which needs slack bits, 12 binary variables in total.
pub fn slack_instance() -> ProsumerProblem {
    ProsumerProblem {
        hours: 2,
        prices: vec![5, 7],
        users: vec![
            User { e_max: 3, loads: vec![Load { energy: 2, working_time: 1 }, Load { energy: 2, working_time: 1 }] },
            User { e_max: 2, loads: vec![Load { energy: 1, working_time: 2 }] },
        ],
    }
}

/// Load bit of (user, load, hour) within the canonical flattening.
pub fn load_bit(p: &ProsumerProblem, user: usize, load: usize, hour: usize) -> usize {
    let before: usize = p.users[..user].iter().map(|u| u.loads.len()).sum();
    (before + load) * p.hours + hour
}

pub fn load_bits(p: &ProsumerProblem) -> usize {
    p.users.iter().map(|u| u.loads.len()).sum::<usize>() * p.hours
}

pub fn cost(p: &ProsumerProblem, x: &[bool]) -> i64 {
    let mut total = 0;
    for (u, user) in p.users.iter().enumerate() {
        for (l, load) in user.loads.iter().enumerate() {
            for h in 0..p.hours {
                if x[load_bit(p, u, l, h)] {
                    total += p.prices[h] * load.energy;
                }
            }
        }
    }
    total
}

pub fn admissible(p: &ProsumerProblem, x: &[bool]) -> bool {
    for (u, user) in p.users.iter().enumerate() {
        for (l, load) in user.loads.iter().enumerate() {
            let on = (0..p.hours).filter(|&h| x[load_bit(p, u, l, h)]).count() as i64;
            if on != load.working_time {
                return false;
            }
        }
        for h in 0..p.hours {
            let drawn: i64 = user
                .loads
                .iter()
                .enumerate()
                .filter(|(l, _)| x[load_bit(p, u, *l, h)])
                .map(|(_, load)| load.energy)
                .sum();
            if drawn > user.e_max {
                return false;
            }
        }
    }
    true
}

pub fn index_bits(index: u64, n: usize) -> Vec<bool> {
    (0..n).map(|v| (index >> (n - 1 - v)) & 1 == 1).collect()
}

/// Minimum cost and every optimal load-bit vector, by plain enumeration.
pub fn brute_optimum(p: &ProsumerProblem) -> Option<(i64, Vec<Vec<bool>>)> {
    let n = load_bits(p);
    let mut best: Option<(i64, Vec<Vec<bool>>)> = None;
    for index in 0..1u64 << n {
        let x = index_bits(index, n);
        if !admissible(p, &x) {
            continue;
        }
        let c = cost(p, &x);
        match &mut best {
            Some((b, v)) if c == *b => v.push(x),
            Some((b, _)) if c > *b => {}
            _ => best = Some((c, vec![x])),
        }
    }
    best.map(|(c, mut v)| {
        v.sort();
        (c, v)
    })
}

/// Checks every assignment of the compiled model: penalties vanish exactly on
/// feasible assignments, every infeasible assignment is penalized by at least
/// `A` and costs more than every feasible one, and the spin energy equals the
/// QUBO value. Returns the number of assignments checked.
pub fn check_penalty_exhaustively(p: &ProsumerProblem) -> Result<u64, String> {
    let (qubo, registry) = transform::build_qubo(p).map_err(|e| e.to_string())?;
    let spin = transform::qubo_to_spin(&qubo);
    let n = registry.len();
    if n > 14 {
        return Err(format!("exhaustive check limited to 14 variables, got {n}"));
    }
    let n_load = load_bits(p);
    let c_up: i64 = p.prices.iter().sum::<i64>() * p.users.iter().flat_map(|u| &u.loads).map(|l| l.energy).sum::<i64>();
    if qubo.penalty <= int(c_up) {
        return Err(format!("penalty {} not above {c_up}", qubo.penalty));
    }
    let mut feasible_max: Option<Rational> = None;
    let mut infeasible_min: Option<Rational> = None;
    for index in 0..1u64 << n {
        let bits = index_bits(index, n);
        let value = qubo.value(&bits).map_err(|e| e.to_string())?;
        if spin.energy_of_index(index) != value {
            return Err(format!("spin/QUBO mismatch at {index:b}"));
        }
        let base = int(cost(p, &bits[..n_load]));
        let decoded = registry.decode(&bits).map_err(|e| e.to_string())?;
        let slack_exact = decoded.residuals.iter().all(|r| {
            let user = &p.users[r.user];
            let drawn: i64 = user
                .loads
                .iter()
                .enumerate()
                .filter(|(l, _)| bits[load_bit(p, r.user, *l, r.hour)])
                .map(|(_, load)| load.energy)
                .sum();
            drawn + r.value == user.e_max
        });
        if admissible(p, &bits[..n_load]) && slack_exact {
            if value != base {
                return Err(format!("penalty on feasible assignment {index:b}"));
            }
            feasible_max = Some(feasible_max.map_or(value, |m: Rational| m.max(value)));
        } else {
            if value - base < qubo.penalty {
                return Err(format!("infeasible {index:b} penalized below A"));
            }
            infeasible_min = Some(infeasible_min.map_or(value, |m: Rational| m.min(value)));
        }
    }
    if let (Some(inf), Some(feas)) = (infeasible_min, feasible_max) {
        if inf <= feas {
            return Err(format!("infeasible minimum {inf} not above feasible maximum {feas}"));
        }
    }
    Ok(1u64 << n)
}

prop_compose! {
    /// Small valid problems: at most 2 users, 2 loads each, 3 hours, so the
    /// compiled model stays well inside exhaustive range.
    pub fn small_problem()(hours in 1usize..=3, users in 1usize..=2)
        (prices in prop::collection::vec(0i64..30, hours),
         users in prop::collection::vec(
             (1i64..=4, prop::collection::vec((1i64..=3, 1i64..=hours as i64), 1..=2)),
             users),
         hours in Just(hours))
        -> ProsumerProblem {
        ProsumerProblem {
            hours,
            prices,
            users: users
                .into_iter()
                .map(|(e_max, loads)| User {
                    e_max,
                    loads: loads.into_iter().map(|(energy, working_time)| Load { energy, working_time }).collect(),
                })
                .collect(),
        }
    }
}
