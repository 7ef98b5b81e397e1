//! Exact and Monte Carlo checks of the probabilistic machinery behind the
//! r-cGA runtime bounds: the distribution of the fitness difference `D_i`
//! outside position `i`, single-frequency drift, potential functions, and
//! the sub-Gaussian increment bound.

mod classify;
mod di;
mod drift;
mod mgf;
mod potential;

pub use classify::{classify_step, StepKind};
pub use di::{exact_di_distribution, lemma_di_zero_bound, mc_di_zero, DiDistribution, MAX_DI_WIDTH};
pub use drift::{
    exact_step_drift, lemma_step_drift_bound, mc_phi_drift, mc_step_drift, mc_step_drift_unchecked,
    MIN_DRIFT_SAMPLES,
};
pub use mgf::{aggregate_subgaussian_exponent, mgf_subgaussian_check, ExponentCheck, MgfCheck};
pub use potential::{phi_drift_bound, potential_phi, potential_phi_bordered, BoundFlag, PhiDriftBound, Potential, PotentialVariant};

use thiserror::Error;

use crate::fitness::FitnessError;
use crate::model::ModelError;
use crate::scalar::Real;

/// Smallest `n` at which the `P[D_i = 0]` floor is asserted rather than
/// flagged.
pub const SMALL_N: usize = 10;

/// Minimum sample count of the `P[D_i = 0]` estimator.
pub const MIN_ZERO_SAMPLES: u64 = 1_000;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Fitness(#[from] FitnessError),
    #[error("n (r - 1) = {width} exceeds the exact-distribution guard {max}")]
    TooLarge { width: usize, max: usize },
    #[error("at least {min} samples required, got {got}")]
    TooFewSamples { got: u64, min: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid increment model: {0}")]
    InvalidModel(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// A Monte Carlo (or exact, with zero standard error) estimate paired with
/// the lemma bound it is compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftReport<T> {
    pub estimate: T,
    pub standard_error: T,
    pub samples: u64,
    pub bound: T,
    /// `estimate >= bound - 3 standard_error`.
    pub satisfied: bool,
    /// The bound is only claimed for large `n`; set for `n < SMALL_N`.
    pub small_n: bool,
}

impl<T: Real> DriftReport<T> {
    pub fn new(estimate: T, standard_error: T, samples: u64, bound: T, small_n: bool) -> Self {
        DriftReport {
            estimate,
            standard_error,
            samples,
            bound,
            satisfied: estimate >= bound - T::of(3.0) * standard_error,
            small_n,
        }
    }

    /// Whether `exact` lies within three standard errors of the estimate.
    pub fn agrees_with(&self, exact: T) -> bool {
        (self.estimate - exact).abs() <= T::of(3.0) * self.standard_error
    }
}

/// Running mean and standard error of i.i.d. samples (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct MeanAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl MeanAccumulator {
    pub(crate) fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub(crate) fn mean(&self) -> f64 {
        self.mean
    }

    pub(crate) fn standard_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        (self.m2 / (n - 1.0) / n).sqrt()
    }
}
