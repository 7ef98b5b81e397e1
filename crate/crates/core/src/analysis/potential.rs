//! Potentials measuring the distance of the model from the optimum's
//! marginals, and the lower bounds on their drift.

use crate::model::FrequencyMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialVariant<T> {
    /// `sum_i (1 - p_{i,r-1})`.
    Plain,
    /// `sum_i max(0, 1 - 1/n - 1/K - p_{i,r-1})`.
    Bordered { n: usize, k: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential<T> {
    pub value: T,
    pub variant: PotentialVariant<T>,
}

/// Contribution of one position with top frequency `p` to the potential.
pub(crate) fn top_distance<T: Real>(variant: &PotentialVariant<T>, p: T) -> T {
    match *variant {
        PotentialVariant::Plain => T::one() - p,
        PotentialVariant::Bordered { n, k } => {
            let target = T::one() - T::one() / T::of_usize(n) - k.recip();
            (target - p).max(T::zero())
        }
    }
}

fn sum_over<T: Real>(matrix: &FrequencyMatrix<T>, variant: PotentialVariant<T>) -> Potential<T> {
    let value = (0..matrix.n())
        .map(|i| top_distance(&variant, matrix.top_frequency(i)))
        .fold(T::zero(), |a, b| a + b);
    Potential { value, variant }
}

pub fn potential_phi<T: Real>(matrix: &FrequencyMatrix<T>) -> Potential<T> {
    sum_over(matrix, PotentialVariant::Plain)
}

/// Bordered potential: positions with `p_{i,r-1} >= 1 - 1/n - 1/K` count as
/// done.
pub fn potential_phi_bordered<T: Real>(matrix: &FrequencyMatrix<T>, n: usize, k: T) -> Potential<T> {
    sum_over(matrix, PotentialVariant::Bordered { n, k })
}

/// A lemma precondition that did not hold (or could not be checked) when a
/// bound was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundFlag {
    /// Some `p_{i,r-1} < 1/4`.
    TopFrequencyBelowQuarter,
    /// No minimum top frequency was supplied.
    TopFrequencyUnchecked,
    /// `phi` below `1/2` (plain) or `10000` (bordered).
    PotentialBelowThreshold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiDriftBound<T> {
    pub value: T,
    pub flags: Vec<BoundFlag>,
}

impl<T> PhiDriftBound<T> {
    pub fn preconditions_hold(&self) -> bool {
        self.flags.is_empty()
    }
}

/// `sqrt(phi) / (30 K)` for the plain potential, `sqrt(phi) / (66 K)` for the
/// bordered one. The value is always returned; violated preconditions are
/// listed in `flags`.
pub fn phi_drift_bound<T: Real>(potential: &Potential<T>, k: T, min_top_frequency: Option<T>) -> PhiDriftBound<T> {
    let (divisor, threshold) = match potential.variant {
        PotentialVariant::Plain => (30.0, 0.5),
        PotentialVariant::Bordered { .. } => (66.0, 10_000.0),
    };
    let mut flags = Vec::new();
    match min_top_frequency {
        Some(p) if p < T::of(0.25) => flags.push(BoundFlag::TopFrequencyBelowQuarter),
        Some(_) => {}
        None => flags.push(BoundFlag::TopFrequencyUnchecked),
    }
    if potential.value < T::of(threshold) {
        flags.push(BoundFlag::PotentialBelowThreshold);
    }
    PhiDriftBound {
        value: potential.value.max(T::zero()).sqrt() / (T::of(divisor) * k),
        flags,
    }
}
