//! JSON documents printed by the `transform` and `exact` subcommands.
//! Variable, user, load and hour indices are 1-based here.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::basis;
use crate::error::Result;
use crate::instance::Instance;
use crate::problem::{ProsumerProblem, Schedule};
use crate::rational::{to_decimal_string, Rational};
use crate::transform::{self, QuadraticBinaryModel, SpinModel, Variable, VariableRegistry};

fn dec(r: &Rational) -> String {
    to_decimal_string(r)
}

fn registry_json(registry: &VariableRegistry) -> Value {
    let entries: Vec<Value> = registry
        .entries()
        .iter()
        .enumerate()
        .map(|(i, v)| match v {
            Variable::Load { user, load, hour } => json!({
                "index": i + 1, "kind": "load",
                "user": user + 1, "load": load + 1, "hour": hour + 1,
            }),
            Variable::Slack { user, hour, bit, weight } => json!({
                "index": i + 1, "kind": "slack",
                "user": user + 1, "hour": hour + 1, "bit": bit + 1, "weight": weight,
            }),
        })
        .collect();
    Value::Array(entries)
}

fn qubo_json(q: &QuadraticBinaryModel) -> Value {
    let linear: BTreeMap<String, String> = q.linear.iter().map(|(i, c)| ((i + 1).to_string(), dec(c))).collect();
    json!({
        "linear": linear,
        "quadratic": quadratic_json(&q.quadratic),
        "offset": dec(&q.constant),
    })
}

fn spin_json(s: &SpinModel) -> Value {
    let linear: BTreeMap<String, String> = s
        .linear
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != Rational::from_integer(0))
        .map(|(i, c)| ((i + 1).to_string(), dec(c)))
        .collect();
    json!({
        "linear": linear,
        "quadratic": quadratic_json(&s.quadratic),
        "offset": dec(&s.offset),
    })
}

/// Keys `"i,j"` ordered numerically by `(i, j)`.
fn quadratic_json(q: &BTreeMap<(usize, usize), Rational>) -> Value {
    let map: serde_json::Map<String, Value> = q
        .iter()
        .map(|((i, j), c)| (format!("{},{}", i + 1, j + 1), Value::String(dec(c))))
        .collect();
    Value::Object(map)
}

pub fn transform_report(problem: &ProsumerProblem) -> Result<Value> {
    let (qubo, registry) = transform::build_qubo(problem)?;
    let spin = transform::qubo_to_spin(&qubo);
    Ok(json!({
        "n": registry.len(),
        "penalty_A": dec(&qubo.penalty),
        "registry": registry_json(&registry),
        "qubo": qubo_json(&qubo),
        "ising": spin_json(&spin),
    }))
}

#[derive(Debug, Clone, Serialize)]
struct ScheduleReport {
    bitstring: String,
    load_bits: String,
    cost: String,
    /// `on[user][load]` lists the 1-based hours the load runs.
    on: Vec<Vec<Vec<usize>>>,
}

fn schedule_on_hours(problem: &ProsumerProblem, s: &Schedule) -> Vec<Vec<Vec<usize>>> {
    problem
        .users
        .iter()
        .enumerate()
        .map(|(u, user)| {
            (0..user.loads.len())
                .map(|l| (0..problem.hours).filter(|&h| s.get(u, l, h)).map(|h| h + 1).collect())
                .collect()
        })
        .collect()
}

pub fn exact_report(instance: &Instance) -> Result<Value> {
    let n = instance.num_qubits();
    let grounds = instance
        .ground
        .states
        .iter()
        .map(|&b| {
            let decoded = instance.registry.decode_index(b)?;
            let cost = instance.problem.schedule_cost(&decoded.schedule)?;
            Ok(ScheduleReport {
                bitstring: basis::index_to_bitstring(b, n),
                load_bits: decoded.schedule.to_bitstring(),
                cost: dec(&cost),
                on: schedule_on_hours(&instance.problem, &decoded.schedule),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "n": n,
        "min_energy": dec(&instance.ground_energy()),
        "ground_states": grounds,
    }))
}
