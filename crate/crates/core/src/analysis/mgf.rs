//! Moment-generating-function check of the sub-Gaussian increment bound.
//!
//! A top frequency with `z = p (1-p)` and drift `eps` is modelled as moving
//! `+1/K` with probability `z (1 + K eps / (2z))`, `-1/K` with probability
//! `z (1 - K eps / (2z))`, and staying put otherwise. Its centred increment
//! is `(4z/K^2 + 2 eps/K, K)`-sub-Gaussian.

use super::potential::potential_phi;
use super::AnalysisError;
use crate::model::FrequencyMatrix;
use crate::scalar::Real;

const RELATIVE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfCheck<T> {
    /// `E[exp(lambda (delta - eps))]`, computed exactly over three outcomes.
    pub lhs: T,
    /// `exp((lambda^2 / 2) (4z/K^2 + 2 eps/K))`.
    pub rhs: T,
    pub satisfied: bool,
}

pub fn mgf_subgaussian_check<T: Real>(p: T, epsilon: T, k: T, lambda: T) -> Result<MgfCheck<T>, AnalysisError> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(AnalysisError::InvalidModel(format!("frequency {p} outside [0, 1]")));
    }
    if !(k > T::zero()) {
        return Err(AnalysisError::InvalidModel(format!("K = {k} must be positive")));
    }
    if !(lambda >= T::zero() && lambda <= k) {
        return Err(AnalysisError::InvalidModel(format!("lambda = {lambda} outside [0, K]")));
    }
    let z = p * (T::one() - p);
    let two = T::of(2.0);
    let slack = T::of(RELATIVE_SLACK);
    let lhs = if z == T::zero() {
        if epsilon != T::zero() {
            return Err(AnalysisError::InvalidModel("a frozen frequency cannot have nonzero drift".into()));
        }
        T::one()
    } else {
        let bias = k * epsilon / (two * z);
        if bias.abs() > T::one() + slack {
            return Err(AnalysisError::InvalidModel(format!(
                "|K eps / (2z)| = {} exceeds 1",
                bias.abs()
            )));
        }
        let x = lambda / k;
        (-lambda * epsilon).exp() * (two * z * x.cosh() + k * epsilon * x.sinh() + T::one() - two * z)
    };
    let exponent = lambda * lambda / two * (T::of(4.0) * z / (k * k) + two * epsilon / k);
    let rhs = exponent.exp();
    Ok(MgfCheck {
        lhs,
        rhs,
        satisfied: lhs <= rhs * (T::one() + slack),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentCheck<T> {
    /// `sum_i (4 z_i / K^2 + 2 eps_i / K)`.
    pub lhs: T,
    /// `8 phi / K^2` with the plain potential `phi`.
    pub rhs: T,
    pub satisfied: bool,
}

/// Aggregated sub-Gaussian exponent of the potential's increment given the
/// per-position drifts `eps_i` of the top frequencies.
pub fn aggregate_subgaussian_exponent<T: Real>(
    matrix: &FrequencyMatrix<T>,
    drifts: &[T],
) -> Result<ExponentCheck<T>, AnalysisError> {
    if drifts.len() != matrix.n() {
        return Err(AnalysisError::Precondition(format!(
            "{} drifts for n = {}",
            drifts.len(),
            matrix.n()
        )));
    }
    let k = matrix.k();
    let lhs = drifts
        .iter()
        .enumerate()
        .map(|(i, &eps)| {
            let p = matrix.top_frequency(i);
            T::of(4.0) * p * (T::one() - p) / (k * k) + T::of(2.0) * eps / k
        })
        .fold(T::zero(), |a, b| a + b);
    let rhs = T::of(8.0) * potential_phi(matrix).value / (k * k);
    Ok(ExponentCheck {
        lhs,
        rhs,
        satisfied: lhs <= rhs * (T::one() + T::of(RELATIVE_SLACK)),
    })
}
