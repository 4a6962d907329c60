//! Dense statevector simulation of the QAOA circuit: Hadamard preparation,
//! diagonal cost phases and a transverse X-rotation mixer.
//!
//! Basis indexing follows [`crate::basis`]: qubit 1 is the most significant bit.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis;
use crate::bruteforce::DiagonalSpectrum;
use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

pub const DEFAULT_QUBIT_LIMIT: usize = 24;

/// Measurement outcomes: basis index to count.
pub type Counts = BTreeMap<u64, u64>;

/// Floating-point cost diagonal handed to the simulator.
///
/// Basis states are grouped by energy level so a cost layer needs one phase
/// per distinct energy instead of one per amplitude. Diagonals built from an
/// exact spectrum also record each level as `min + k * step` with integer `k`,
/// which lets the phases come from two short tables of powers of
/// `exp(-i γ step)` instead of a trigonometric call per level.
#[derive(Debug, Clone)]
pub struct CostDiagonal {
    energies: Vec<f64>,
    levels: Vec<f64>,
    level_of: Vec<u32>,
    grid: Option<Grid>,
}

#[derive(Debug, Clone)]
struct Grid {
    step: f64,
    block: usize,
    hi_len: usize,
    /// `(hi, lo)` with `k = hi * block + lo`, per level.
    split: Vec<(u32, u32)>,
}

/// Largest `k` for which the grid is used; above it the tables would be
/// longer than the level list they replace.
const MAX_GRID_STEPS: u64 = 1 << 24;

impl CostDiagonal {
    pub fn new(energies: Vec<f64>) -> Self {
        let mut levels: Vec<f64> = energies.clone();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let level_of = energies
            .iter()
            .map(|e| levels.binary_search_by(|l| l.total_cmp(e)).expect("level present") as u32)
            .collect();
        Self {
            energies,
            levels,
            level_of,
            grid: None,
        }
    }

    fn with_exact_levels(mut self, exact: &[Rational]) -> Self {
        let mut sorted: Vec<Rational> = exact.to_vec();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.levels.len() || sorted.len() < 2 {
            return self;
        }
        let min = sorted[0];
        let denom = sorted.iter().fold(1i64, |acc, r| acc.lcm(r.denom()));
        let scaled: Option<Vec<i64>> = sorted
            .iter()
            .map(|r| ((*r - min) * Rational::from_integer(denom)).to_integer().checked_abs())
            .collect();
        let Some(scaled) = scaled else { return self };
        let g = scaled.iter().fold(0i64, |acc, &k| acc.gcd(&k));
        let steps: Vec<u64> = scaled.iter().map(|&k| (k / g) as u64).collect();
        let max = *steps.last().expect("two levels");
        if max > MAX_GRID_STEPS || 2 * (max as f64).sqrt() as usize > 4 * steps.len() {
            return self;
        }
        let block = ((max + 1) as f64).sqrt().ceil() as u64;
        self.grid = Some(Grid {
            step: to_f64(&Rational::new(g, denom)),
            block: block as usize,
            hi_len: (max / block) as usize + 1,
            split: steps.iter().map(|&k| ((k / block) as u32, (k % block) as u32)).collect(),
        });
        self
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn min(&self) -> f64 {
        self.levels[0]
    }

    pub fn is_constant(&self) -> bool {
        self.levels.len() <= 1
    }

    /// `exp(-i γ E)` for every level, written into `out`.
    fn level_phases(&self, gamma: f64, out: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>) {
        out.clear();
        let Some(grid) = &self.grid else {
            out.extend(self.levels.iter().map(|&e| Complex64::from_polar(1.0, -gamma * e)));
            return;
        };
        // scratch = [w^0 .. w^(block-1), W^0 .. W^(hi_len-1)], W = w^block.
        let block = grid.block;
        scratch.clear();
        let w = Complex64::from_polar(1.0, -gamma * grid.step);
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..block {
            scratch.push(acc);
            acc *= w;
        }
        let big = acc;
        let mut acc = Complex64::from_polar(1.0, -gamma * self.levels[0]);
        for _ in 0..grid.hi_len {
            scratch.push(acc);
            acc *= big;
        }
        let (lo, hi) = scratch.split_at(block);
        out.extend(grid.split.iter().map(|&(h, l)| hi[h as usize] * lo[l as usize]));
    }
}

impl From<&DiagonalSpectrum> for CostDiagonal {
    fn from(spectrum: &DiagonalSpectrum) -> Self {
        CostDiagonal::new(spectrum.energies.iter().map(to_f64).collect()).with_exact_levels(&spectrum.energies)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `H^{⊗n} |0…0⟩`.
    pub fn uniform(num_qubits: usize, limit: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > limit || num_qubits >= 63 {
            return Err(Error::LimitExceeded {
                what: "statevector",
                size: num_qubits,
                limit,
            });
        }
        let dim = 1usize << num_qubits;
        let amp = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self {
            num_qubits,
            amplitudes: vec![amp; dim],
        })
    }

    pub fn basis_state(num_qubits: usize, index: u64) -> Result<Self> {
        let mut s = Self::uniform(num_qubits, DEFAULT_QUBIT_LIMIT)?;
        if index >= s.amplitudes.len() as u64 {
            return Err(Error::IndexOutOfRange {
                index: index as usize,
                num_vars: s.amplitudes.len(),
            });
        }
        s.amplitudes.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        s.amplitudes[index as usize] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Wraps raw amplitudes; the length must be a power of two. No normalization
    /// is applied.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "statevector length {dim} is not a power of two ≥ 2"
            )));
        }
        Ok(Self {
            num_qubits: dim.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_dim(&self, diag: &CostDiagonal) -> Result<()> {
        if diag.len() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                found: diag.len(),
            });
        }
        Ok(())
    }

    /// `|b⟩ ↦ exp(-i γ E_b) |b⟩`.
    pub fn apply_cost_layer(&mut self, diag: &CostDiagonal, gamma: f64) -> Result<()> {
        self.check_dim(diag)?;
        self.cost_phases(diag, gamma, &mut Vec::new(), &mut Vec::new());
        Ok(())
    }

    fn cost_phases(&mut self, diag: &CostDiagonal, gamma: f64, phases: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>) {
        diag.level_phases(gamma, phases, scratch);
        for (amp, &level) in self.amplitudes.iter_mut().zip(&diag.level_of) {
            *amp *= phases[level as usize];
        }
    }

    /// Alternating cost and mixer layers, one pair per `(γ, β)`.
    pub fn apply_layers(&mut self, diag: &CostDiagonal, gammas: &[f64], betas: &[f64]) -> Result<()> {
        self.check_dim(diag)?;
        if gammas.len() != betas.len() {
            return Err(Error::DimensionMismatch { expected: gammas.len(), found: betas.len() });
        }
        let mut phases = Vec::with_capacity(diag.levels.len());
        let mut scratch = Vec::new();
        for (&gamma, &beta) in gammas.iter().zip(betas) {
            self.cost_phases(diag, gamma, &mut phases, &mut scratch);
            self.apply_mixer_layer(beta);
        }
        Ok(())
    }

    /// `Rx(2β) = [[cos β, -i sin β], [-i sin β, cos β]]` on every qubit.
    pub fn apply_mixer_layer(&mut self, beta: f64) {
        let (s, c) = beta.sin_cos();
        for q in 0..self.num_qubits {
            let stride = 1usize << (self.num_qubits - 1 - q);
            for block in self.amplitudes.chunks_exact_mut(2 * stride) {
                let (lo, hi) = block.split_at_mut(stride);
                for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a0, *a1);
                    // -i s (re + i im) = s im - i s re
                    *a0 = Complex64::new(c * x.re + s * y.im, c * x.im - s * y.re);
                    *a1 = Complex64::new(c * y.re + s * x.im, c * y.im - s * x.re);
                }
            }
        }
    }

    pub fn expectation(&self, diag: &CostDiagonal) -> Result<f64> {
        self.check_dim(diag)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&diag.energies)
            .map(|(a, e)| a.norm_sqr() * e)
            .sum())
    }

    /// `⟨Z_i Z_j⟩` for 0-based qubits `i ≠ j`.
    pub fn zz_expectation(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.num_qubits;
        for q in [i, j] {
            if q >= n {
                return Err(Error::IndexOutOfRange { index: q, num_vars: n });
            }
        }
        if i == j {
            return Err(Error::InvalidArgument(format!("correlation needs two distinct qubits, got {i} twice")));
        }
        let mask = (1u64 << (n - 1 - i)) | (1u64 << (n - 1 - j));
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(b, a)| {
                // z_i z_j = +1 when the two bits agree.
                let parity = ((b as u64) & mask).count_ones() % 2;
                if parity == 0 {
                    a.norm_sqr()
                } else {
                    -a.norm_sqr()
                }
            })
            .sum())
    }

    /// Draws `shots` independent measurements in the computational basis.
    ///
    /// Uses ChaCha8 seeded from `seed` and inverse-CDF lookup, so the counts are
    /// a pure function of the state and the seed.
    pub fn sample(&self, shots: u64, seed: u64) -> Counts {
        let mut cumulative = Vec::with_capacity(self.amplitudes.len());
        let mut acc = 0.0;
        for a in &self.amplitudes {
            acc += a.norm_sqr();
            cumulative.push(acc);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = Counts::new();
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * acc;
            let idx = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
            *counts.entry(idx as u64).or_insert(0) += 1;
        }
        counts
    }

    pub fn bitstring(&self, index: u64) -> String {
        basis::index_to_bitstring(index, self.num_qubits)
    }
}

/// Mean energy of sampled outcomes.
pub fn sampled_energy(counts: &Counts, diag: &CostDiagonal) -> Result<f64> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    let sum: f64 = counts
        .iter()
        .map(|(&b, &c)| diag.energies[b as usize] * c as f64)
        .sum();
    Ok(sum / total as f64)
}
