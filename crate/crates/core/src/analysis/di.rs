//! The distribution of `D_i = sum_{j != i} c(x_j) - sum_{j != i} c(y_j)` for
//! two independent samples `x`, `y` of the model.

use std::ops::RangeInclusive;

use rand::Rng;

use super::{AnalysisError, DriftReport, MIN_ZERO_SAMPLES, SMALL_N};
use crate::fitness::Contribution;
use crate::model::FrequencyMatrix;
use crate::scalar::Real;

/// Guard on `n (r - 1)` for the exact convolution.
pub const MAX_DI_WIDTH: usize = 10_000;

/// Probability masses of `D_i` on the integers `-half_width..=half_width`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiDistribution<T> {
    half_width: i64,
    masses: Vec<T>,
}

impl<T: Real> DiDistribution<T> {
    pub fn support(&self) -> RangeInclusive<i64> {
        -self.half_width..=self.half_width
    }

    pub fn mass(&self, d: i64) -> T {
        if d.abs() > self.half_width {
            return T::zero();
        }
        self.masses[(d + self.half_width) as usize]
    }

    pub fn p_zero(&self) -> T {
        self.mass(0)
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    pub fn total(&self) -> T {
        self.masses.iter().fold(T::zero(), |a, &b| a + b)
    }

    /// `P[D_i >= d]`.
    pub fn tail_at_least(&self, d: i64) -> T {
        let start = (d + self.half_width).clamp(0, self.masses.len() as i64) as usize;
        self.masses[start..].iter().fold(T::zero(), |a, &b| a + b)
    }
}

/// Distribution of `c(x_j)` at one position, indexed by contribution value.
fn contribution_distribution<T: Real>(matrix: &FrequencyMatrix<T>, position: usize, c: &Contribution, width: usize) -> Vec<T> {
    let r = matrix.r();
    let mut g = vec![T::zero(); width + 1];
    for v in 0..r {
        let slot = c.value(v as u32, r) as usize;
        g[slot] = g[slot] + matrix.frequency(position, v);
    }
    g
}

/// Exact distribution of `D_i` by convolving the per-position differences
/// `c(x_j) - c(y_j)` over all `j != i`.
pub fn exact_di_distribution<T: Real>(
    matrix: &FrequencyMatrix<T>,
    position: usize,
    c: &Contribution,
) -> Result<DiDistribution<T>, AnalysisError> {
    let (n, r) = (matrix.n(), matrix.r());
    if position >= n {
        return Err(AnalysisError::Precondition(format!("position {position} out of range for n = {n}")));
    }
    if n * (r - 1) > MAX_DI_WIDTH {
        return Err(AnalysisError::TooLarge {
            width: n * (r - 1),
            max: MAX_DI_WIDTH,
        });
    }
    if let Contribution::Table(t) = c {
        if t.len() != r {
            return Err(AnalysisError::Precondition(format!("contribution table of length {} for r = {r}", t.len())));
        }
    }
    let step = c.max_value(r) as usize;
    let half_width = (n - 1) * step;
    let mut dist = vec![T::zero(); 2 * half_width + 1];
    dist[half_width] = T::one();
    // current support is half_width - reach ..= half_width + reach
    let mut reach = 0usize;
    let mut next = dist.clone();
    for j in (0..n).filter(|&j| j != position) {
        let g = contribution_distribution(matrix, j, c, step);
        // h[d + step] = P[c(x_j) - c(y_j) = d]
        let mut h = vec![T::zero(); 2 * step + 1];
        for (a, &ga) in g.iter().enumerate() {
            for (b, &gb) in g.iter().enumerate() {
                let idx = a + step - b;
                h[idx] = h[idx] + ga * gb;
            }
        }
        let lo = half_width - reach;
        let hi = half_width + reach;
        for slot in next[lo - step..=hi + step].iter_mut() {
            *slot = T::zero();
        }
        for s in lo..=hi {
            let mass = dist[s];
            if mass == T::zero() {
                continue;
            }
            for (k, &hk) in h.iter().enumerate() {
                let target = s + k - step;
                next[target] = next[target] + mass * hk;
            }
        }
        reach += step;
        std::mem::swap(&mut dist, &mut next);
    }
    Ok(DiDistribution {
        half_width: half_width as i64,
        masses: dist,
    })
}

/// `4 / (9 (2 (r - 1) sqrt(3 n) + 1))`.
pub fn lemma_di_zero_bound<T: Real>(n: usize, r: usize) -> T {
    let n = T::of_usize(n);
    let r1 = T::of_usize(r - 1);
    T::of(4.0) / (T::of(9.0) * (T::of(2.0) * r1 * (T::of(3.0) * n).sqrt() + T::one()))
}

/// Frequency estimate of `P[D_i = 0]` with a binomial standard error; the
/// bound field is [`lemma_di_zero_bound`].
pub fn mc_di_zero<T: Real, R: Rng + ?Sized>(
    matrix: &FrequencyMatrix<T>,
    position: usize,
    c: &Contribution,
    samples: u64,
    rng: &mut R,
) -> Result<DriftReport<T>, AnalysisError> {
    let (n, r) = (matrix.n(), matrix.r());
    if samples < MIN_ZERO_SAMPLES {
        return Err(AnalysisError::TooFewSamples {
            got: samples,
            min: MIN_ZERO_SAMPLES,
        });
    }
    if position >= n {
        return Err(AnalysisError::Precondition(format!("position {position} out of range for n = {n}")));
    }
    let mut x = vec![0u32; n];
    let mut y = vec![0u32; n];
    let mut zeros = 0u64;
    for _ in 0..samples {
        matrix.sample_into(rng, &mut x);
        matrix.sample_into(rng, &mut y);
        let d: i64 = x
            .iter()
            .zip(&y)
            .enumerate()
            .filter(|&(j, _)| j != position)
            .map(|(_, (&a, &b))| c.value(a, r) as i64 - c.value(b, r) as i64)
            .sum();
        zeros += (d == 0) as u64;
    }
    let p = zeros as f64 / samples as f64;
    let se = (p * (1.0 - p) / samples as f64).sqrt();
    Ok(DriftReport::new(
        T::of(p),
        T::of(se),
        samples,
        lemma_di_zero_bound(n, r),
        n < SMALL_N,
    ))
}
