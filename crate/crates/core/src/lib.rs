//! Prosumer load scheduling compiled to a penalized QUBO and Ising model,
//! solved with exact-statevector QAOA and recursive QAOA against a
//! brute-force oracle.

pub mod basis;
pub mod bruteforce;
pub mod error;
pub mod fixtures;
pub mod harness;
pub mod instance;
pub mod problem;
pub mod qaoa;
pub mod rational;
pub mod rqaoa;
pub mod seed;
pub mod simulator;
pub mod transform;

pub use error::{Error, Result};
pub use instance::Instance;
pub use problem::{Load, ProsumerProblem, Schedule, User};
pub use qaoa::{run_qaoa, ObjectiveMode, OptimizerConfig, QaoaParams, QaoaResult};
pub use rational::Rational;
pub use rqaoa::{run_rqaoa, RqaoaResult};
pub use simulator::{CostDiagonal, Statevector};
pub use transform::{build_qubo, qubo_to_spin, QuadraticBinaryModel, SpinModel, Variable, VariableRegistry};
