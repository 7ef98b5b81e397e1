//! Drift of the optimal-value frequency `p_{i,r-1}` and of the potential.

use rand::Rng;

use super::potential::{phi_drift_bound, potential_phi, potential_phi_bordered, top_distance};
use super::{exact_di_distribution, AnalysisError, DriftReport, MeanAccumulator, SMALL_N};
use crate::fitness::{Contribution, FitnessFunction};
use crate::model::{update_row_bordered, update_row_unbordered, BorderMode, FrequencyMatrix};
use crate::scalar::Real;

/// Minimum sample count of the single-frequency drift estimator.
pub const MIN_DRIFT_SAMPLES: u64 = 10_000;

/// Lemma right-hand side for `E[Delta_{i,r-1}]`.
///
/// Identity contribution: `8 p (1-p) / (9 K (2 (r-1) sqrt(3n) + 1))`.
/// Indicator contribution: `(8/9) p (1-p) / (K (2 sqrt(3V) + 1))` with
/// `V = sum_j p_{j,r-1} (1 - p_{j,r-1})`.
pub fn lemma_step_drift_bound<T: Real>(
    matrix: &FrequencyMatrix<T>,
    contribution: &Contribution,
    position: usize,
) -> Result<T, AnalysisError> {
    let (n, r, k) = (matrix.n(), matrix.r(), matrix.k());
    let p = matrix.top_frequency(position);
    let z = p * (T::one() - p);
    let eight = T::of(8.0);
    let nine = T::of(9.0);
    let three = T::of(3.0);
    let two = T::of(2.0);
    match contribution {
        Contribution::Identity => {
            let denom = nine * k * (two * T::of_usize(r - 1) * (three * T::of_usize(n)).sqrt() + T::one());
            Ok(eight * z / denom)
        }
        Contribution::Indicator => {
            let v = (0..n)
                .map(|j| {
                    let q = matrix.top_frequency(j);
                    q * (T::one() - q)
                })
                .fold(T::zero(), |a, b| a + b);
            Ok(eight / nine * z / (k * (two * (three * v).sqrt() + T::one())))
        }
        Contribution::Table(_) => Err(AnalysisError::Unsupported(
            "no drift bound is known for custom contribution tables".into(),
        )),
    }
}

/// Change of `p_{i,r-1}` when row `i` is updated with the given pair.
fn top_change<T: Real>(matrix: &FrequencyMatrix<T>, position: usize, winner: u32, loser: u32) -> Result<T, AnalysisError> {
    if winner == loser {
        return Ok(T::zero());
    }
    let r = matrix.r();
    let mut row = matrix.row(position);
    let before = row[r - 1];
    match matrix.mode() {
        BorderMode::Unbordered => {
            update_row_unbordered(&mut row, winner, loser, matrix.k())?;
        }
        BorderMode::Bordered => {
            update_row_bordered(&mut row, winner, loser, matrix.n(), matrix.k())?;
        }
    }
    Ok(row[r - 1] - before)
}

fn check_top_range<T: Real>(matrix: &FrequencyMatrix<T>, position: usize) -> Result<(), AnalysisError> {
    let p = matrix.top_frequency(position);
    let step = matrix.k().recip();
    let slack = T::of(1e-12);
    if p < step - slack || p > T::one() - step + slack {
        return Err(AnalysisError::Precondition(format!(
            "p_{{{position},r-1}} = {p} outside [1/K, 1 - 1/K]"
        )));
    }
    Ok(())
}

/// Monte Carlo estimate of `E[Delta_{i,r-1}]` on a frozen model: every
/// sample replays one full step (two offspring, ranking, update of row `i`)
/// from the same state. The bound is [`lemma_step_drift_bound`].
pub fn mc_step_drift<T: Real, R: Rng + ?Sized>(
    matrix: &FrequencyMatrix<T>,
    fitness: &FitnessFunction,
    position: usize,
    samples: u64,
    rng: &mut R,
) -> Result<DriftReport<T>, AnalysisError> {
    if samples < MIN_DRIFT_SAMPLES {
        return Err(AnalysisError::TooFewSamples {
            got: samples,
            min: MIN_DRIFT_SAMPLES,
        });
    }
    if position < matrix.n() {
        check_top_range(matrix, position)?;
    }
    mc_step_drift_unchecked(matrix, fitness, position, samples, rng)
}

/// [`mc_step_drift`] without the frequency-range and sample-count
/// preconditions, for degenerate states.
pub fn mc_step_drift_unchecked<T: Real, R: Rng + ?Sized>(
    matrix: &FrequencyMatrix<T>,
    fitness: &FitnessFunction,
    position: usize,
    samples: u64,
    rng: &mut R,
) -> Result<DriftReport<T>, AnalysisError> {
    let n = matrix.n();
    if position >= n {
        return Err(AnalysisError::Precondition(format!("position {position} out of range for n = {n}")));
    }
    if samples == 0 {
        return Err(AnalysisError::TooFewSamples { got: 0, min: 1 });
    }
    let bound = lemma_step_drift_bound(matrix, fitness.contribution(), position)?;
    let mut x = vec![0u32; n];
    let mut y = vec![0u32; n];
    let mut acc = MeanAccumulator::default();
    for _ in 0..samples {
        matrix.sample_into(rng, &mut x);
        matrix.sample_into(rng, &mut y);
        let (winner, loser) = if fitness.evaluate_unchecked(&x) < fitness.evaluate_unchecked(&y) {
            (&y, &x)
        } else {
            (&x, &y)
        };
        let delta = top_change(matrix, position, winner[position], loser[position])?;
        acc.push(delta.as_f64());
    }
    Ok(DriftReport::new(
        T::of(acc.mean()),
        T::of(acc.standard_error()),
        samples,
        bound,
        n < SMALL_N,
    ))
}

/// Exact `E[Delta_{i,r-1}]` for the unbordered update, conditioning on the
/// values `(a, b)` sampled at position `i`:
/// `(1/K) sum_{a != b} p_a p_b s_ab (2 P[D_i >= c(b) - c(a)] - 1)` with
/// `s_ab = 1{a = r-1} - 1{b = r-1}`. Assumes no loser frequency below `1/K`.
pub fn exact_step_drift<T: Real>(
    matrix: &FrequencyMatrix<T>,
    fitness: &FitnessFunction,
    position: usize,
) -> Result<T, AnalysisError> {
    if matrix.mode().is_bordered() {
        return Err(AnalysisError::Unsupported("exact drift covers the unbordered update only".into()));
    }
    let r = matrix.r();
    let c = fitness.contribution();
    let d = exact_di_distribution(matrix, position, c)?;
    let top = (r - 1) as u32;
    let mut total = T::zero();
    for a in 0..r as u32 {
        for b in 0..r as u32 {
            let sign = (a == top) as i32 - (b == top) as i32;
            if a == b || sign == 0 {
                continue;
            }
            let pa = matrix.frequency(position, a as usize);
            let pb = matrix.frequency(position, b as usize);
            let x_wins = d.tail_at_least(c.value(b, r) as i64 - c.value(a, r) as i64);
            total = total + pa * pb * T::of(sign as f64) * (T::of(2.0) * x_wins - T::one());
        }
    }
    Ok(total / matrix.k())
}

/// Monte Carlo estimate of `E[phi_t - phi_{t+1}]` (plain potential when
/// unbordered, bordered potential otherwise), compared against
/// [`phi_drift_bound`].
pub fn mc_phi_drift<T: Real, R: Rng + ?Sized>(
    matrix: &FrequencyMatrix<T>,
    fitness: &FitnessFunction,
    samples: u64,
    rng: &mut R,
) -> Result<DriftReport<T>, AnalysisError> {
    if samples == 0 {
        return Err(AnalysisError::TooFewSamples { got: 0, min: 1 });
    }
    let n = matrix.n();
    let potential = match matrix.mode() {
        BorderMode::Unbordered => potential_phi(matrix),
        BorderMode::Bordered => potential_phi_bordered(matrix, n, matrix.k()),
    };
    let min_top = (0..n)
        .map(|i| matrix.top_frequency(i))
        .fold(T::infinity(), T::min);
    let bound = phi_drift_bound(&potential, matrix.k(), Some(min_top));
    let mut x = vec![0u32; n];
    let mut y = vec![0u32; n];
    let mut acc = MeanAccumulator::default();
    for _ in 0..samples {
        matrix.sample_into(rng, &mut x);
        matrix.sample_into(rng, &mut y);
        let (winner, loser) = if fitness.evaluate_unchecked(&x) < fitness.evaluate_unchecked(&y) {
            (&y, &x)
        } else {
            (&x, &y)
        };
        let mut decrease = T::zero();
        for i in (0..n).filter(|&i| winner[i] != loser[i]) {
            let p = matrix.top_frequency(i);
            let after = p + top_change(matrix, i, winner[i], loser[i])?;
            decrease = decrease + top_distance(&potential.variant, p) - top_distance(&potential.variant, after);
        }
        acc.push(decrease.as_f64());
    }
    Ok(DriftReport::new(
        T::of(acc.mean()),
        T::of(acc.standard_error()),
        samples,
        bound.value,
        false,
    ))
}
