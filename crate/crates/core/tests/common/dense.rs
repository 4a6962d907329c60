//! Dense-matrix reference for statevector evolution: Kronecker products of
//! Pauli matrices and explicit Rz / CNOT / Rx gate sequences.

use num_complex::Complex64 as C;
use prosumer_qaoa::rational::to_f64;
use prosumer_qaoa::rational::int;
use prosumer_qaoa::SpinModel;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type M = Vec<Vec<C>>;

pub fn eye(d: usize) -> M {
    (0..d).map(|i| (0..d).map(|j| if i == j { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) }).collect()).collect()
}

pub fn kron(a: &M, b: &M) -> M {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![C::new(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn mul(a: &M, b: &M) -> M {
    let n = a.len();
    let mut out = vec![vec![C::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == C::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn apply(m: &M, v: &[C]) -> Vec<C> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// `gate` on qubit `q` (qubit 0 leftmost in the tensor product).
pub fn on_qubit(gate: &M, q: usize, n: usize) -> M {
    let id = eye(2);
    (0..n).fold(vec![vec![C::new(1.0, 0.0)]], |acc, k| kron(&acc, if k == q { gate } else { &id }))
}

pub fn pauli_z() -> M {
    vec![vec![C::new(1.0, 0.0), C::new(0.0, 0.0)], vec![C::new(0.0, 0.0), C::new(-1.0, 0.0)]]
}

pub fn rz(theta: f64) -> M {
    vec![
        vec![C::from_polar(1.0, -theta / 2.0), C::new(0.0, 0.0)],
        vec![C::new(0.0, 0.0), C::from_polar(1.0, theta / 2.0)],
    ]
}

pub fn rx(theta: f64) -> M {
    let (s, c) = (theta / 2.0).sin_cos();
    vec![vec![C::new(c, 0.0), C::new(0.0, -s)], vec![C::new(0.0, -s), C::new(c, 0.0)]]
}

/// CNOT with control `c` and target `t` as a permutation matrix.
pub fn cnot(c: usize, t: usize, n: usize) -> M {
    let d = 1 << n;
    let mut m = vec![vec![C::new(0.0, 0.0); d]; d];
    for b in 0..d {
        let image = if b >> (n - 1 - c) & 1 == 1 { b ^ (1 << (n - 1 - t)) } else { b };
        m[image][b] = C::new(1.0, 0.0);
    }
    m
}

/// Dense Hamiltonian as a sum of Kronecker products of Z and I.
pub fn dense_hamiltonian(model: &SpinModel) -> M {
    let n = model.num_vars;
    let d = 1 << n;
    let mut h = eye(d);
    let off = C::new(to_f64(&model.offset), 0.0);
    h.iter_mut().flatten().for_each(|x| *x *= off);
    let mut add = |term: M, coeff: f64| {
        for (row, trow) in h.iter_mut().zip(&term) {
            for (x, t) in row.iter_mut().zip(trow) {
                *x += t * coeff;
            }
        }
    };
    for (i, a) in model.linear.iter().enumerate() {
        add(on_qubit(&pauli_z(), i, n), to_f64(a));
    }
    for (&(i, j), b) in &model.quadratic {
        add(mul(&on_qubit(&pauli_z(), i, n), &on_qubit(&pauli_z(), j, n)), to_f64(b));
    }
    h
}

/// `exp(-i γ H)` built from Rz and CNOT gates plus the global offset phase.
pub fn cost_circuit(model: &SpinModel, gamma: f64) -> M {
    let n = model.num_vars;
    let mut u = eye(1 << n);
    let phase = C::from_polar(1.0, -gamma * to_f64(&model.offset));
    u.iter_mut().flatten().for_each(|x| *x *= phase);
    for (i, a) in model.linear.iter().enumerate() {
        u = mul(&on_qubit(&rz(2.0 * gamma * to_f64(a)), i, n), &u);
    }
    for (&(i, j), b) in &model.quadratic {
        let zz = mul(&cnot(i, j, n), &mul(&on_qubit(&rz(2.0 * gamma * to_f64(b)), j, n), &cnot(i, j, n)));
        u = mul(&zz, &u);
    }
    u
}

pub fn mixer_circuit(n: usize, beta: f64) -> M {
    (0..n).fold(eye(1 << n), |u, q| mul(&on_qubit(&rx(2.0 * beta), q, n), &u))
}

pub fn hadamards(n: usize) -> Vec<C> {
    let a = C::new((1u64 << n) as f64, 0.0).sqrt().inv();
    vec![a; 1 << n]
}

pub fn example_model() -> SpinModel {
    let mut m = SpinModel::new(3);
    m.linear = vec![int(1), int(0), int(2)];
    m.add_quadratic(0, 1, int(-4));
    m.add_quadratic(1, 2, int(-2));
    m
}

pub fn random_model(n: usize, rng: &mut ChaCha8Rng) -> SpinModel {
    let mut m = SpinModel::new(n);
    for i in 0..n {
        m.linear[i] = prosumer_qaoa::Rational::new(rng.random_range(-6..=6), rng.random_range(1..=2));
        for j in i + 1..n {
            if rng.random_bool(0.7) {
                m.add_quadratic(i, j, int(rng.random_range(-5..=5)));
            }
        }
    }
    m.offset = prosumer_qaoa::Rational::new(rng.random_range(-9..=9), 2);
    m
}

pub fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
