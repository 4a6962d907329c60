//! Exhaustive evaluation of a [`SpinModel`] over all `2^N` basis states.
//!
//! Energies are computed exactly: coefficients are scaled to integers by the
//! common denominator and the basis is walked in Gray-code order, so each step
//! flips one spin and updates the energy from that spin's local field.

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::transform::SpinModel;

pub const DEFAULT_DIAGONAL_LIMIT: usize = 24;

/// Diagonal of the Ising Hamiltonian in the computational basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalSpectrum {
    pub num_vars: usize,
    pub energies: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundStates {
    pub energy: Rational,
    /// Basis indices attaining `energy`, ascending.
    pub states: Vec<u64>,
}

struct ScaledModel {
    n: usize,
    denom: i64,
    linear: Vec<i128>,
    neighbours: Vec<Vec<(usize, i128)>>,
    offset: i128,
}

impl ScaledModel {
    fn new(model: &SpinModel) -> Self {
        let denom = model
            .linear
            .iter()
            .chain(model.quadratic.values())
            .chain(std::iter::once(&model.offset))
            .fold(1i64, |acc, r| acc.lcm(r.denom()));
        let scale = |r: &Rational| (*r.numer() as i128) * (denom / r.denom()) as i128;
        let mut neighbours = vec![Vec::new(); model.num_vars];
        for (&(i, j), b) in &model.quadratic {
            neighbours[i].push((j, scale(b)));
            neighbours[j].push((i, scale(b)));
        }
        Self {
            n: model.num_vars,
            denom,
            linear: model.linear.iter().map(scale).collect(),
            neighbours,
            offset: scale(&model.offset),
        }
    }

    /// Calls `visit(index, scaled_energy)` for every basis index in Gray-code order.
    fn walk(&self, mut visit: impl FnMut(u64, i128)) {
        let n = self.n;
        let mut spins = vec![1i8; n];
        // All spins +1 at index 0.
        let mut energy = self.offset
            + self.linear.iter().sum::<i128>()
            + self.neighbours.iter().flatten().map(|&(_, b)| b).sum::<i128>() / 2;
        visit(0, energy);
        let total: u64 = 1 << n;
        let mut gray = 0u64;
        for k in 1..total {
            let pos = k.trailing_zeros() as usize;
            let var = n - 1 - pos;
            let z = spins[var] as i128;
            let field = self.linear[var]
                + self.neighbours[var]
                    .iter()
                    .map(|&(u, b)| b * spins[u] as i128)
                    .sum::<i128>();
            energy -= 2 * z * field;
            spins[var] = -spins[var];
            gray ^= 1 << pos;
            visit(gray, energy);
        }
    }
}

fn check_limit(model: &SpinModel, limit: usize) -> Result<()> {
    if model.num_vars > limit || model.num_vars >= 63 {
        return Err(Error::LimitExceeded {
            what: "spin model",
            size: model.num_vars,
            limit,
        });
    }
    Ok(())
}

pub fn diagonal(model: &SpinModel, limit: usize) -> Result<DiagonalSpectrum> {
    check_limit(model, limit)?;
    let scaled = ScaledModel::new(model);
    let mut energies = vec![Rational::zero(); 1usize << model.num_vars];
    scaled.walk(|index, e| {
        energies[index as usize] = Rational::new(e as i64, scaled.denom);
    });
    Ok(DiagonalSpectrum {
        num_vars: model.num_vars,
        energies,
    })
}

pub fn ground_states(model: &SpinModel, limit: usize) -> Result<GroundStates> {
    check_limit(model, limit)?;
    let scaled = ScaledModel::new(model);
    let mut best = i128::MAX;
    let mut states = Vec::new();
    scaled.walk(|index, e| {
        if e < best {
            best = e;
            states.clear();
            states.push(index);
        } else if e == best {
            states.push(index);
        }
    });
    states.sort_unstable();
    Ok(GroundStates {
        energy: Rational::new(best as i64, scaled.denom),
        states,
    })
}

impl DiagonalSpectrum {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn min(&self) -> Rational {
        *self.energies.iter().min().expect("spectrum is non-empty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn small_example() -> SpinModel {
        let mut m = SpinModel::new(3);
        m.linear = vec![int(1), int(0), int(2)];
        m.add_quadratic(0, 1, int(-4));
        m.add_quadratic(1, 2, int(-2));
        m
    }

    #[test]
    fn small_example_diagonal() {
        let d = diagonal(&small_example(), DEFAULT_DIAGONAL_LIMIT).unwrap();
        let expected: Vec<Rational> = [-3, -3, 9, 1, 3, 3, -1, -9].iter().map(|&v| int(v)).collect();
        assert_eq!(d.energies, expected);
        let g = ground_states(&small_example(), DEFAULT_DIAGONAL_LIMIT).unwrap();
        assert_eq!(g.energy, int(-9));
        assert_eq!(g.states, vec![7]);
    }

    #[test]
    fn zero_and_constant_models() {
        let d = diagonal(&SpinModel::new(2), 24).unwrap();
        assert_eq!(d.energies, vec![int(0); 4]);
        let mut c = SpinModel::new(3);
        c.offset = Rational::new(5, 2);
        let g = ground_states(&c, 24).unwrap();
        assert_eq!(g.energy, Rational::new(5, 2));
        assert_eq!(g.states, (0..8).collect::<Vec<u64>>());
    }

    #[test]
    fn fractional_coefficients() {
        let mut m = SpinModel::new(2);
        m.linear = vec![Rational::new(1, 2), Rational::new(-1, 4)];
        m.add_quadratic(0, 1, Rational::new(1, 3));
        m.offset = Rational::new(1, 6);
        let d = diagonal(&m, 24).unwrap();
        for (b, e) in d.energies.iter().enumerate() {
            assert_eq!(*e, m.energy_of_index(b as u64));
        }
    }

    #[test]
    fn limit_exceeded() {
        assert!(matches!(
            diagonal(&SpinModel::new(5), 4),
            Err(Error::LimitExceeded { size: 5, limit: 4, .. })
        ));
    }
}
