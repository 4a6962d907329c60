//! A problem compiled once together with its exact oracle, shared by every
//! QAOA and recursive-QAOA run on it.

use std::collections::BTreeSet;

use crate::bruteforce::{self, DiagonalSpectrum, GroundStates};
use crate::error::Result;
use crate::problem::ProsumerProblem;
use crate::rational::Rational;
use crate::simulator::CostDiagonal;
use crate::transform::{self, QuadraticBinaryModel, SpinModel, VariableRegistry};

#[derive(Debug, Clone)]
pub struct Instance {
    pub problem: ProsumerProblem,
    pub qubo: QuadraticBinaryModel,
    pub registry: VariableRegistry,
    pub spin: SpinModel,
    pub spectrum: DiagonalSpectrum,
    pub diag: CostDiagonal,
    pub ground: GroundStates,
    optimal: BTreeSet<u64>,
}

impl Instance {
    /// Compiles `problem` and tabulates its full spectrum; fails with
    /// `LimitExceeded` above `limit` qubits.
    pub fn compile(problem: &ProsumerProblem, limit: usize) -> Result<Self> {
        let (qubo, registry) = transform::build_qubo(problem)?;
        let spin = transform::qubo_to_spin(&qubo);
        let spectrum = bruteforce::diagonal(&spin, limit)?;
        let min = spectrum.min();
        let states: Vec<u64> = spectrum
            .energies
            .iter()
            .enumerate()
            .filter(|(_, e)| **e == min)
            .map(|(b, _)| b as u64)
            .collect();
        let diag = CostDiagonal::from(&spectrum);
        Ok(Self {
            problem: problem.clone(),
            qubo,
            registry,
            spin,
            diag,
            optimal: states.iter().copied().collect(),
            ground: GroundStates { energy: min, states },
            spectrum,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.spin.num_vars
    }

    pub fn ground_energy(&self) -> Rational {
        self.ground.energy
    }

    pub fn optimal_set(&self) -> &BTreeSet<u64> {
        &self.optimal
    }

    pub fn is_optimal(&self, index: u64) -> bool {
        self.optimal.contains(&index)
    }

    /// Whether the load part of `index` is an admissible schedule.
    pub fn is_admissible(&self, index: u64) -> bool {
        self.registry
            .decode_index(index)
            .and_then(|d| self.problem.is_admissible(&d.schedule))
            .unwrap_or(false)
    }
}
