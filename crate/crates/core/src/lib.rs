//! Simulation and analysis of the ranking-based compact genetic algorithm
//! over multi-valued decision variables (r-cGA).
//!
//! The core is generic over the scalar type through [`Real`]; the aliases
//! below fix it to `f64` (and `f32` where useful).

pub mod analysis;
pub mod cli;
pub mod engine;
pub mod fitness;
pub mod model;
pub mod scalar;
pub mod verify;

pub use fitness::{Contribution, FitnessError, FitnessFunction, FitnessKind};
pub use model::{BorderMode, Borders, FrequencyMatrix, Individual, ModelError, Representation};
pub use scalar::Real;

/// Generator used for every simulation and estimator.
pub type SimRng = rand_pcg::Pcg64Mcg;

pub type Matrix = FrequencyMatrix<f64>;
pub type MatrixF32 = FrequencyMatrix<f32>;
pub type Config = engine::RunConfig<f64>;
pub type ConfigF32 = engine::RunConfig<f32>;
pub type RunResult = engine::RunResult<f64>;
pub type Excursion = engine::DriftExcursion<f64>;
pub type Report = analysis::DriftReport<f64>;
