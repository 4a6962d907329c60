mod common;

use std::collections::BTreeSet;

use num_traits::Zero;
use proptest::prelude::*;
use prosumer_qaoa::basis;
use prosumer_qaoa::bruteforce;
use prosumer_qaoa::fixtures::reference_instance;
use prosumer_qaoa::rational::{int, Rational};
use prosumer_qaoa::transform::{self, slack_weights, QuadraticBinaryModel, SpinModel};
use prosumer_qaoa::{ProsumerProblem, Schedule};


use common::*;

fn fixtures_up_to_12_qubits() -> Vec<(String, ProsumerProblem)> {
    let mut out: Vec<(String, ProsumerProblem)> = (2..=5).map(|h| (format!("h{h}"), reference_instance(h))).collect();
    out.push(("slack".into(), slack_instance()));
    out
}

#[test]
fn penalty_soundness_and_spin_equivalence_on_fixtures() {
    for (name, p) in fixtures_up_to_12_qubits() {
        check_penalty_exhaustively(&p).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn argmin_preserved_on_fixtures() {
    for (name, p) in fixtures_up_to_12_qubits() {
        let (qubo, registry) = transform::build_qubo(&p).unwrap();
        let spin = transform::qubo_to_spin(&qubo);
        let ground = bruteforce::ground_states(&spin, 24).unwrap();
        let (best, optima) = brute_optimum(&p).unwrap();
        assert_eq!(ground.energy, int(best), "{name}");
        let decoded: BTreeSet<Vec<bool>> = ground
            .states
            .iter()
            .map(|&s| registry.decode_index(s).unwrap().schedule.bits().to_vec())
            .collect();
        assert_eq!(decoded, optima.into_iter().collect(), "{name}");
    }
}

#[test]
fn reference_h4_hamiltonian_coefficients() {
    let (qubo, _) = transform::build_qubo(&reference_instance(4)).unwrap();
    let spin = transform::qubo_to_spin(&qubo);
    let half = |x: i64| Rational::new(x, 2);
    let linear = [int(-283), int(-283), int(-284), int(-285), half(-21), half(-21), int(-11), half(-23)];
    assert_eq!(spin.linear, linear.to_vec());
    let mut pairs = BTreeSet::new();
    for block in [0, 4] {
        for i in block..block + 4 {
            for j in i + 1..block + 4 {
                pairs.insert((i, j));
            }
        }
    }
    assert_eq!(spin.quadratic.keys().copied().collect::<BTreeSet<_>>(), pairs);
    assert!(spin.quadratic.values().all(|&c| c == int(131)));
    assert_eq!(qubo.penalty, int(262));
}

#[test]
fn slack_weights_reach_exactly_the_residual_range() {
    for e_max in 1..=64i64 {
        let w = slack_weights(e_max);
        let m = (0..).find(|&m| 1i64 << m >= e_max + 1).unwrap();
        assert_eq!(w.len(), m, "e_max {e_max}");
        let mut reached = BTreeSet::new();
        for mask in 0u32..1 << w.len() {
            let s: i64 = w.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, x)| x).sum();
            reached.insert(s);
        }
        assert_eq!(reached, (0..=e_max).collect::<BTreeSet<_>>(), "e_max {e_max}: {w:?}");
    }
}

#[test]
fn registry_is_canonical() {
    let p = slack_instance();
    let (_, registry) = transform::build_qubo(&p).unwrap();
    let n_load = load_bits(&p);
    for (u, user) in p.users.iter().enumerate() {
        for l in 0..user.loads.len() {
            for h in 0..p.hours {
                assert_eq!(registry.load_index(u, l, h), load_bit(&p, u, l, h));
            }
        }
    }
    // User 0 draws up to 4 > 3 and carries two slack bits per hour; user 1 does not.
    assert!(registry.has_slack(0) && !registry.has_slack(1));
    assert_eq!(registry.len(), n_load + 2 * p.hours);
    assert_eq!(registry.slack_index(0, 0, 0), n_load);
    assert_eq!(registry.slack_index(0, 1, 1), n_load + 3);
}

fn random_qubo(n: usize) -> impl Strategy<Value = QuadraticBinaryModel> {
    let coeff = (-20i64..=20, 1i64..=4).prop_map(|(p, q)| Rational::new(p, q));
    (
        prop::collection::vec(coeff.clone(), n),
        prop::collection::vec(coeff.clone(), n * (n - 1) / 2),
        coeff,
    )
        .prop_map(move |(lin, quad, c)| {
            let mut m = QuadraticBinaryModel::new(n);
            for (i, v) in lin.into_iter().enumerate() {
                m.add_linear(i, v);
            }
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    m.add_quadratic(i, j, quad[k]);
                    k += 1;
                }
            }
            m.add_constant(c);
            m
        })
}

/// Direct evaluation of `constant + sum l_i x_i + sum q_ij x_i x_j`.
fn direct_value(m: &QuadraticBinaryModel, x: &[bool]) -> Rational {
    let mut v = m.constant;
    for (&i, &c) in &m.linear {
        if x[i] {
            v += c;
        }
    }
    for (&(i, j), &c) in &m.quadratic {
        if x[i] && x[j] {
            v += c;
        }
    }
    v
}

/// Direct evaluation of a spin model on `z`.
fn direct_energy(s: &SpinModel, z: &[i8]) -> Rational {
    let mut e = s.offset;
    for (i, &a) in s.linear.iter().enumerate() {
        e += a * int(z[i] as i64);
    }
    for (&(i, j), &b) in &s.quadratic {
        e += b * int((z[i] * z[j]) as i64);
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_qubo_spin_equivalence(q in random_qubo(6)) {
        let s = transform::qubo_to_spin(&q);
        for index in 0..64u64 {
            let x = index_bits(index, 6);
            let z: Vec<i8> = x.iter().map(|&b| if b { -1 } else { 1 }).collect();
            prop_assert_eq!(direct_value(&q, &x), q.value(&x).unwrap());
            prop_assert_eq!(direct_energy(&s, &z), direct_value(&q, &x));
            prop_assert_eq!(s.energy_of_index(index), direct_value(&q, &x));
        }
    }

    #[test]
    fn random_problems_preserve_argmin(p in small_problem()) {
        let (qubo, registry) = transform::build_qubo(&p).unwrap();
        prop_assume!(registry.len() <= 14);
        let spin = transform::qubo_to_spin(&qubo);
        match brute_optimum(&p) {
            None => {
                // No admissible schedule: every assignment carries a penalty.
                let ground = bruteforce::ground_states(&spin, 24).unwrap();
                prop_assert!(ground.energy >= qubo.penalty);
            }
            Some((best, optima)) => {
                let ground = bruteforce::ground_states(&spin, 24).unwrap();
                prop_assert_eq!(ground.energy, int(best));
                let decoded: BTreeSet<Vec<bool>> = ground
                    .states
                    .iter()
                    .map(|&s| registry.decode_index(s).unwrap().schedule.bits().to_vec())
                    .collect();
                prop_assert_eq!(decoded, optima.into_iter().collect::<BTreeSet<_>>());
            }
        }
    }

    #[test]
    fn decode_encode_round_trip(p in small_problem(), seed in any::<u64>()) {
        let (_, registry) = transform::build_qubo(&p).unwrap();
        let n = registry.len();
        prop_assume!(n <= 63);
        let index = seed & ((1u64 << n) - 1);
        let bits = basis::index_to_bits(index, n);
        let d = registry.decode(&bits).unwrap();
        prop_assert_eq!(registry.encode(&d.schedule, &d.slack_bits).unwrap(), bits);
        prop_assert_eq!(d.schedule.bits(), &index_bits(index, n)[..load_bits(&p)]);
    }

    #[test]
    fn consistent_slack_zeroes_the_penalty(p in small_problem(), seed in any::<u64>()) {
        let (qubo, registry) = transform::build_qubo(&p).unwrap();
        let n_load = load_bits(&p);
        prop_assume!(n_load <= 63);
        let x = index_bits(seed & ((1u64 << n_load) - 1), n_load);
        let schedule = Schedule::from_bits(&p, x.clone()).unwrap();
        let power_ok = p.users.iter().enumerate().all(|(u, user)| (0..p.hours).all(|h| {
            user.loads.iter().enumerate().filter(|(l, _)| x[load_bit(&p, u, *l, h)]).map(|(_, l)| l.energy).sum::<i64>() <= user.e_max
        }));
        match registry.consistent_slack(&p, &schedule) {
            None => prop_assert!(!power_ok),
            Some(slack) => {
                prop_assert!(power_ok);
                if admissible(&p, &x) {
                    let bits = registry.encode(&schedule, &slack).unwrap();
                    prop_assert_eq!(qubo.value(&bits).unwrap(), int(cost(&p, &x)));
                }
            }
        }
    }

    #[test]
    fn raising_a_price_never_lowers_the_optimum(p in small_problem(), hour in 0usize..3, bump in 1i64..10) {
        prop_assume!(load_bits(&p) <= 12);
        let hour = hour % p.hours;
        let mut q = p.clone();
        q.prices[hour] += bump;
        if let (Ok((a, _)), Ok((b, _))) = (p.optimal_schedules(24), q.optimal_schedules(24)) {
            prop_assert!(b >= a);
        }
    }

    #[test]
    fn permuting_equal_price_hours_permutes_optima(
        price in 0i64..30,
        e_max in 1i64..=4,
        loads in prop::collection::vec((1i64..=3, 1i64..=3), 1..=2),
        extra in 0i64..30,
    ) {
        // Hours 0 and 1 share a price; swapping them must map optima onto optima.
        let p = ProsumerProblem {
            hours: 3,
            prices: vec![price, price, extra],
            users: vec![prosumer_qaoa::User {
                e_max,
                loads: loads.into_iter().map(|(energy, working_time)| prosumer_qaoa::Load { energy, working_time }).collect(),
            }],
        };
        if let Ok((best, optima)) = p.optimal_schedules(24) {
            let set: BTreeSet<Vec<bool>> = optima.iter().map(|s| s.bits().to_vec()).collect();
            for s in &optima {
                let mut swapped = s.bits().to_vec();
                for l in 0..p.users[0].loads.len() {
                    swapped.swap(load_bit(&p, 0, l, 0), load_bit(&p, 0, l, 1));
                }
                prop_assert!(set.contains(&swapped));
                prop_assert_eq!(p.schedule_cost(&Schedule::from_bits(&p, swapped).unwrap()).unwrap(), best);
            }
        }
    }
}

#[test]
fn zero_coefficients_are_dropped() {
    let mut m = QuadraticBinaryModel::new(3);
    m.add_linear(0, int(2));
    m.add_linear(0, int(-2));
    m.add_quadratic(2, 1, int(5));
    m.add_quadratic(1, 2, int(-5));
    assert!(m.linear.is_empty() && m.quadratic.is_empty());
    assert!(m.constant.is_zero());
}
