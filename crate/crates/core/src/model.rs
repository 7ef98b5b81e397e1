//! The r-cGA probabilistic model: an `n x r` row-stochastic frequency matrix,
//! categorical sampling from it, and the unbordered and bordered updates.
//!
//! Without borders and with `r | K` every frequency is a multiple of `1/K`,
//! so the matrix stores integer numerators over `K` and all updates are
//! exact. Otherwise rows are stored as floating point values.

use rand::Rng;
use thiserror::Error;

use crate::scalar::Real;

/// Loser frequencies below this value after a raw unbordered step count as a
/// negative-frequency event (clamped to zero, row renormalized).
const NEGATIVE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("value count r must be at least 2, got {0}")]
    TooFewValues(usize),
    #[error("position count n must be at least 1")]
    NoPositions,
    #[error("granularity K must be finite and positive, got {0}")]
    InvalidGranularity(f64),
    #[error("borders [{lower}, {upper}] do not contain the uniform frequency 1/{r}")]
    DegenerateBorders { lower: f64, upper: f64, r: usize },
    #[error("value {value} out of range for r = {r}")]
    ValueOutOfRange { value: u32, r: usize },
    #[error("position {position} out of range for n = {n}")]
    PositionOutOfRange { position: usize, n: usize },
    #[error("loser value {0} has zero frequency and cannot have been sampled")]
    Unsampleable(u32),
    #[error("expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// Whether frequencies are restricted to `[1/((r-1)n), 1-1/n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BorderMode {
    Unbordered,
    Bordered,
}

impl BorderMode {
    pub fn is_bordered(self) -> bool {
        matches!(self, BorderMode::Bordered)
    }
}

/// Storage used for the frequencies of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Integer numerators over the fixed denominator `K`.
    Exact { denominator: u32 },
    Float,
}

/// Lower and upper frequency border of the bordered model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Borders<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Real> Borders<T> {
    pub fn new(n: usize, r: usize) -> Self {
        let n_t = T::of_usize(n);
        Borders {
            lower: T::one() / (T::of_usize(r - 1) * n_t),
            upper: T::one() - T::one() / n_t,
        }
    }

    pub fn contains(&self, value: T) -> bool {
        value >= self.lower && value <= self.upper
    }
}

/// A sampled candidate solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual<T> {
    pub values: Vec<u32>,
    pub fitness: T,
}

/// Result of updating one row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateOutcome<T> {
    pub changed: bool,
    /// Increase actually applied to the winner's frequency, in `[0, 1/K]`.
    pub effective_winner_increment: T,
    /// Set when the loser was clamped at zero (unbordered float storage only).
    pub clamped_negative: bool,
    /// Set when the loser was clamped at the lower border.
    pub lower_clamped: bool,
    pub renormalized: bool,
}

impl<T: Real> UpdateOutcome<T> {
    fn unchanged() -> Self {
        UpdateOutcome {
            changed: false,
            effective_winner_increment: T::zero(),
            clamped_negative: false,
            lower_clamped: false,
            renormalized: false,
        }
    }
}

/// Counters of events that only occur outside the well-behaved regime.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ModelDiagnostics {
    pub negative_clamps: u64,
    pub lower_clamps: u64,
    pub renormalizations: u64,
}

impl ModelDiagnostics {
    fn record<T>(&mut self, outcome: &UpdateOutcome<T>) {
        self.negative_clamps += outcome.clamped_negative as u64;
        self.lower_clamps += outcome.lower_clamped as u64;
        self.renormalizations += outcome.renormalized as u64;
    }
}

fn check_pair(r: usize, winner: u32, loser: u32) -> Result<(), ModelError> {
    for value in [winner, loser] {
        if value as usize >= r {
            return Err(ModelError::ValueOutOfRange { value, r });
        }
    }
    Ok(())
}

/// Moves `1/K` of probability from `loser` to `winner` on integer numerators.
///
/// Returns whether the row changed.
pub fn update_row_exact(row: &mut [u32], winner: u32, loser: u32) -> Result<bool, ModelError> {
    check_pair(row.len(), winner, loser)?;
    if winner == loser {
        return Ok(false);
    }
    let l = loser as usize;
    if row[l] == 0 {
        return Err(ModelError::Unsampleable(loser));
    }
    row[l] -= 1;
    row[winner as usize] += 1;
    Ok(true)
}

/// Unbordered float update `p_j += (1{winner = j} - 1{loser = j}) / K`.
///
/// A loser frequency smaller than `1/K` (possible only when `r` does not
/// divide `K`) is clamped to zero and the row renormalized; the outcome
/// reports it through `clamped_negative`.
pub fn update_row_unbordered<T: Real>(
    row: &mut [T],
    winner: u32,
    loser: u32,
    k: T,
) -> Result<UpdateOutcome<T>, ModelError> {
    check_pair(row.len(), winner, loser)?;
    if winner == loser {
        return Ok(UpdateOutcome::unchanged());
    }
    let (w, l) = (winner as usize, loser as usize);
    if row[l] <= T::zero() {
        return Err(ModelError::Unsampleable(loser));
    }
    let step = k.recip();
    let before = row[w];
    row[w] = row[w] + step;
    row[l] = row[l] - step;

    let mut outcome = UpdateOutcome {
        changed: true,
        ..UpdateOutcome::unchanged()
    };
    if row[l] < T::zero() {
        outcome.clamped_negative = row[l] < -T::of(NEGATIVE_SLACK);
        row[l] = T::zero();
    }
    let sum = row.iter().fold(T::zero(), |acc, &p| acc + p);
    if (sum - T::one()).abs() > T::row_tolerance() {
        for p in row.iter_mut() {
            *p = *p / sum;
        }
        outcome.renormalized = true;
    }
    outcome.effective_winner_increment = (row[w] - before).max(T::zero()).min(step);
    Ok(outcome)
}

/// Bordered update: the raw `±1/K` step followed by capping into
/// `[1/((r-1)n), 1-1/n]`.
///
/// Capping is deterministic and single pass:
/// 1. a loser pushed below the lower border is clamped to it and the deficit
///    is taken from the remaining non-winner entries in proportion to their
///    slack above the lower border; whatever slack cannot cover is taken off
///    the winner's increment;
/// 2. a winner above the upper border is clamped to it and the excess is
///    spread over the other entries in proportion to their headroom below
///    the upper border.
pub fn update_row_bordered<T: Real>(
    row: &mut [T],
    winner: u32,
    loser: u32,
    n: usize,
    k: T,
) -> Result<UpdateOutcome<T>, ModelError> {
    let r = row.len();
    check_pair(r, winner, loser)?;
    if winner == loser {
        return Ok(UpdateOutcome::unchanged());
    }
    let Borders { lower, upper } = Borders::<T>::new(n, r);
    let (w, l) = (winner as usize, loser as usize);
    let step = k.recip();
    let before = row[w];
    row[w] = row[w] + step;
    row[l] = row[l] - step;

    let mut outcome = UpdateOutcome {
        changed: true,
        ..UpdateOutcome::unchanged()
    };

    if row[l] < lower {
        outcome.lower_clamped = true;
        let deficit = lower - row[l];
        row[l] = lower;
        let slack: T = (0..r)
            .filter(|&j| j != w && j != l)
            .map(|j| (row[j] - lower).max(T::zero()))
            .fold(T::zero(), |a, b| a + b);
        let taken = deficit.min(slack);
        if taken > T::zero() {
            for j in (0..r).filter(|&j| j != w && j != l) {
                let share = taken * (row[j] - lower).max(T::zero()) / slack;
                row[j] = (row[j] - share).max(lower);
            }
        }
        row[w] = row[w] - (deficit - taken);
    }

    if row[w] > upper {
        let excess = row[w] - upper;
        row[w] = upper;
        let headroom: T = (0..r)
            .filter(|&j| j != w)
            .map(|j| (upper - row[j]).max(T::zero()))
            .fold(T::zero(), |a, b| a + b);
        let given = excess.min(headroom);
        if given > T::zero() {
            for j in (0..r).filter(|&j| j != w) {
                let share = given * (upper - row[j]).max(T::zero()) / headroom;
                row[j] = (row[j] + share).min(upper);
            }
        }
    }

    outcome.renormalized = rebalance_within(row, lower, upper);
    // rounding can leave the increment an ulp outside [0, 1/K]
    outcome.effective_winner_increment = (row[w] - before).max(T::zero()).min(step);
    Ok(outcome)
}

/// Removes accumulated row-sum drift beyond tolerance without leaving
/// `[lower, upper]`: surplus is taken proportionally to slack, a shortage is
/// added proportionally to headroom.
fn rebalance_within<T: Real>(row: &mut [T], lower: T, upper: T) -> bool {
    let sum = row.iter().fold(T::zero(), |acc, &p| acc + p);
    let error = sum - T::one();
    if error.abs() <= T::row_tolerance() {
        return false;
    }
    let room = |p: T| {
        if error > T::zero() {
            (p - lower).max(T::zero())
        } else {
            (upper - p).max(T::zero())
        }
    };
    let total = row.iter().fold(T::zero(), |acc, &p| acc + room(p));
    if total > T::zero() {
        let shares: Vec<T> = row.iter().map(|&p| error * room(p) / total).collect();
        for (p, share) in row.iter_mut().zip(shares) {
            *p = (*p - share).max(lower).min(upper);
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq)]
enum Cells<T> {
    Exact { numerators: Vec<u32>, denominator: u32 },
    Float(Vec<T>),
}

/// The `n x r` frequency matrix of the r-cGA.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyMatrix<T> {
    n: usize,
    r: usize,
    k: T,
    mode: BorderMode,
    cells: Cells<T>,
    diagnostics: ModelDiagnostics,
}

fn exact_denominator<T: Real>(r: usize, k: T, mode: BorderMode) -> Option<u32> {
    if mode.is_bordered() || k.fract() != T::zero() || k > T::of(u32::MAX as f64) {
        return None;
    }
    let denominator = k.to_u32()?;
    (denominator as usize % r == 0).then_some(denominator)
}

impl<T: Real> FrequencyMatrix<T> {
    /// Uniform matrix with every entry `1/r`.
    ///
    /// Uses exact numerators when unbordered and `r` divides an integral `K`.
    pub fn new(n: usize, r: usize, k: T, mode: BorderMode) -> Result<Self, ModelError> {
        Self::build(n, r, k, mode, true)
    }

    /// Like [`FrequencyMatrix::new`] but always stores floating point rows.
    pub fn new_float(n: usize, r: usize, k: T, mode: BorderMode) -> Result<Self, ModelError> {
        Self::build(n, r, k, mode, false)
    }

    fn build(n: usize, r: usize, k: T, mode: BorderMode, allow_exact: bool) -> Result<Self, ModelError> {
        validate_shape(n, r, k)?;
        if mode.is_bordered() {
            let borders = Borders::<T>::new(n, r);
            let uniform = T::one() / T::of_usize(r);
            if borders.lower > uniform || borders.upper < uniform {
                return Err(ModelError::DegenerateBorders {
                    lower: borders.lower.as_f64(),
                    upper: borders.upper.as_f64(),
                    r,
                });
            }
        }
        let cells = match exact_denominator(r, k, mode).filter(|_| allow_exact) {
            Some(denominator) => Cells::Exact {
                numerators: vec![denominator / r as u32; n * r],
                denominator,
            },
            None => Cells::Float(vec![T::one() / T::of_usize(r); n * r]),
        };
        Ok(FrequencyMatrix {
            n,
            r,
            k,
            mode,
            cells,
            diagnostics: ModelDiagnostics::default(),
        })
    }

    /// Matrix with the given float rows. The rows must satisfy the invariants
    /// of `mode`.
    pub fn from_rows(rows: Vec<Vec<T>>, k: T, mode: BorderMode) -> Result<Self, ModelError> {
        let n = rows.len();
        let r = rows.first().map_or(0, Vec::len);
        validate_shape(n, r, k)?;
        let mut flat = Vec::with_capacity(n * r);
        for row in rows {
            if row.len() != r {
                return Err(ModelError::ShapeMismatch { expected: r, got: row.len() });
            }
            flat.extend(row);
        }
        let matrix = FrequencyMatrix {
            n,
            r,
            k,
            mode,
            cells: Cells::Float(flat),
            diagnostics: ModelDiagnostics::default(),
        };
        matrix.check_invariants()?;
        Ok(matrix)
    }

    /// Unbordered matrix with exact numerators over `denominator`, which also
    /// serves as `K`.
    pub fn from_numerators(rows: Vec<Vec<u32>>, denominator: u32) -> Result<Self, ModelError> {
        let n = rows.len();
        let r = rows.first().map_or(0, Vec::len);
        let k = T::of(denominator as f64);
        validate_shape(n, r, k)?;
        let mut numerators = Vec::with_capacity(n * r);
        for row in rows {
            if row.len() != r {
                return Err(ModelError::ShapeMismatch { expected: r, got: row.len() });
            }
            numerators.extend(row);
        }
        let matrix = FrequencyMatrix {
            n,
            r,
            k,
            mode: BorderMode::Unbordered,
            cells: Cells::Exact { numerators, denominator },
            diagnostics: ModelDiagnostics::default(),
        };
        matrix.check_invariants()?;
        Ok(matrix)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn mode(&self) -> BorderMode {
        self.mode
    }

    pub fn diagnostics(&self) -> ModelDiagnostics {
        self.diagnostics
    }

    pub fn representation(&self) -> Representation {
        match &self.cells {
            Cells::Exact { denominator, .. } => Representation::Exact { denominator: *denominator },
            Cells::Float(_) => Representation::Float,
        }
    }

    pub fn borders(&self) -> Option<Borders<T>> {
        self.mode.is_bordered().then(|| Borders::new(self.n, self.r))
    }

    pub fn frequency(&self, position: usize, value: usize) -> T {
        let idx = position * self.r + value;
        match &self.cells {
            Cells::Exact { numerators, denominator } => {
                T::of(numerators[idx] as f64) / T::of(*denominator as f64)
            }
            Cells::Float(cells) => cells[idx],
        }
    }

    /// Frequency of the optimal value `r - 1` at `position`.
    pub fn top_frequency(&self, position: usize) -> T {
        self.frequency(position, self.r - 1)
    }

    pub fn row(&self, position: usize) -> Vec<T> {
        (0..self.r).map(|j| self.frequency(position, j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.row(i)).collect()
    }

    /// Integer numerators of a row, when stored exactly.
    pub fn numerators(&self, position: usize) -> Option<&[u32]> {
        match &self.cells {
            Cells::Exact { numerators, .. } => Some(&numerators[position * self.r..(position + 1) * self.r]),
            Cells::Float(_) => None,
        }
    }

    /// Draws one value at `position` by a cumulative scan over its row.
    pub fn sample_value<R: Rng + ?Sized>(&self, position: usize, rng: &mut R) -> u32 {
        let range = position * self.r..(position + 1) * self.r;
        match &self.cells {
            Cells::Exact { numerators, denominator } => sample_exact(&numerators[range], *denominator, rng),
            Cells::Float(cells) => sample_float(&cells[range], rng),
        }
    }

    /// Fills `out` (length `n`) with independently sampled values.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [u32]) {
        debug_assert_eq!(out.len(), self.n);
        match &self.cells {
            Cells::Exact { numerators, denominator } => {
                for (row, slot) in numerators.chunks_exact(self.r).zip(out.iter_mut()) {
                    *slot = sample_exact(row, *denominator, rng);
                }
            }
            Cells::Float(cells) => {
                for (row, slot) in cells.chunks_exact(self.r).zip(out.iter_mut()) {
                    *slot = sample_float(row, rng);
                }
            }
        }
    }

    /// Samples a full individual; the fitness is left at zero for the caller.
    pub fn sample_individual<R: Rng + ?Sized>(&self, rng: &mut R) -> Individual<T> {
        let mut values = vec![0; self.n];
        self.sample_into(rng, &mut values);
        Individual { values, fitness: T::zero() }
    }

    /// Updates one row with the mode-appropriate rule.
    pub fn update_position(&mut self, position: usize, winner: u32, loser: u32) -> Result<UpdateOutcome<T>, ModelError> {
        if position >= self.n {
            return Err(ModelError::PositionOutOfRange { position, n: self.n });
        }
        let (n, r, k, mode) = (self.n, self.r, self.k, self.mode);
        let range = position * r..(position + 1) * r;
        let outcome = match &mut self.cells {
            Cells::Exact { numerators, .. } => {
                let changed = update_row_exact(&mut numerators[range], winner, loser)?;
                UpdateOutcome {
                    changed,
                    effective_winner_increment: if changed { k.recip() } else { T::zero() },
                    ..UpdateOutcome::unchanged()
                }
            }
            Cells::Float(cells) => match mode {
                BorderMode::Unbordered => update_row_unbordered(&mut cells[range], winner, loser, k)?,
                BorderMode::Bordered => update_row_bordered(&mut cells[range], winner, loser, n, k)?,
            },
        };
        self.diagnostics.record(&outcome);
        Ok(outcome)
    }

    /// Updates every row with the winner's and loser's value at that position.
    pub fn apply_update(&mut self, winner: &[u32], loser: &[u32]) -> Result<(), ModelError> {
        for len in [winner.len(), loser.len()] {
            if len != self.n {
                return Err(ModelError::ShapeMismatch { expected: self.n, got: len });
            }
        }
        for (i, (&w, &l)) in winner.iter().zip(loser).enumerate() {
            if w != l {
                self.update_position(i, w, l)?;
            }
        }
        Ok(())
    }

    /// Checks row sums, ranges and, for exact storage, the total numerator.
    pub fn check_invariants(&self) -> Result<(), ModelError> {
        let borders = self.borders();
        match &self.cells {
            Cells::Exact { numerators, denominator } => {
                for (i, row) in numerators.chunks_exact(self.r).enumerate() {
                    let total: u64 = row.iter().map(|&x| x as u64).sum();
                    if total != *denominator as u64 {
                        return Err(ModelError::Invariant(format!(
                            "row {i} numerators sum to {total}, expected {denominator}"
                        )));
                    }
                }
            }
            Cells::Float(cells) => {
                for (i, row) in cells.chunks_exact(self.r).enumerate() {
                    let sum = row.iter().fold(T::zero(), |acc, &p| acc + p);
                    if (sum - T::one()).abs() > T::row_tolerance() {
                        return Err(ModelError::Invariant(format!("row {i} sums to {sum}")));
                    }
                    for (j, &p) in row.iter().enumerate() {
                        let inside = match borders {
                            Some(b) => b.contains(p),
                            None => p >= T::zero() && p <= T::one(),
                        };
                        if !inside {
                            return Err(ModelError::Invariant(format!("entry ({i}, {j}) = {p} out of range")));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn validate_shape<T: Real>(n: usize, r: usize, k: T) -> Result<(), ModelError> {
    if r < 2 {
        return Err(ModelError::TooFewValues(r));
    }
    if n == 0 {
        return Err(ModelError::NoPositions);
    }
    if !(k.is_finite() && k > T::zero()) {
        return Err(ModelError::InvalidGranularity(k.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

fn sample_exact<R: Rng + ?Sized>(row: &[u32], denominator: u32, rng: &mut R) -> u32 {
    let u = rng.random_range(0..denominator);
    let mut cumulative = 0;
    for (j, &count) in row.iter().enumerate() {
        cumulative += count;
        if u < cumulative {
            return j as u32;
        }
    }
    unreachable!("numerators sum to the denominator")
}

fn sample_float<T: Real, R: Rng + ?Sized>(row: &[T], rng: &mut R) -> u32 {
    let u = T::unit(rng);
    let mut cumulative = T::zero();
    for (j, &p) in row.iter().enumerate() {
        cumulative = cumulative + p;
        if u < cumulative {
            return j as u32;
        }
    }
    // u fell into the rounding gap above the computed row sum
    row.iter().rposition(|&p| p > T::zero()).unwrap_or(row.len() - 1) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_pcg::Pcg64Mcg;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn init_uniform_two_values() {
        let m = FrequencyMatrix::<f64>::new(2, 2, 10.0, BorderMode::Unbordered).unwrap();
        assert_eq!(m.representation(), Representation::Exact { denominator: 10 });
        assert!(m.rows().iter().flatten().all(|&p| p == 0.5));
    }

    #[test]
    fn init_exact_quarter() {
        let m = FrequencyMatrix::<f64>::new(3, 4, 8.0, BorderMode::Unbordered).unwrap();
        for i in 0..3 {
            assert_eq!(m.numerators(i).unwrap(), &[2, 2, 2, 2]);
            assert!(m.row(i).iter().all(|&p| p == 0.25));
        }
    }

    #[test]
    fn init_bordered() {
        let m = FrequencyMatrix::<f64>::new(10, 3, 100.0, BorderMode::Bordered).unwrap();
        assert_eq!(m.representation(), Representation::Float);
        assert!(m.rows().iter().flatten().all(|&p| close(p, 1.0 / 3.0)));
        let b = m.borders().unwrap();
        assert!(close(b.lower, 0.05));
        assert!(close(b.upper, 0.9));
    }

    #[test]
    fn init_falls_back_to_float_when_r_does_not_divide_k() {
        let m = FrequencyMatrix::<f64>::new(4, 3, 200.0, BorderMode::Unbordered).unwrap();
        assert_eq!(m.representation(), Representation::Float);
        let m = FrequencyMatrix::<f64>::new(4, 3, 300.5, BorderMode::Unbordered).unwrap();
        assert_eq!(m.representation(), Representation::Float);
    }

    #[test]
    fn init_rejects_bad_shapes() {
        assert_eq!(
            FrequencyMatrix::<f64>::new(3, 1, 10.0, BorderMode::Unbordered),
            Err(ModelError::TooFewValues(1))
        );
        assert_eq!(
            FrequencyMatrix::<f64>::new(0, 2, 10.0, BorderMode::Unbordered),
            Err(ModelError::NoPositions)
        );
        assert!(matches!(
            FrequencyMatrix::<f64>::new(3, 2, 0.0, BorderMode::Unbordered),
            Err(ModelError::InvalidGranularity(_))
        ));
        // n = 1 puts the upper border at 0
        assert!(matches!(
            FrequencyMatrix::<f64>::new(1, 3, 10.0, BorderMode::Bordered),
            Err(ModelError::DegenerateBorders { .. })
        ));
    }

    #[test]
    fn degenerate_rows_sample_deterministically() {
        let mut rng = Pcg64Mcg::seed_from_u64(3);
        let m = FrequencyMatrix::<f64>::from_rows(vec![vec![0.0, 0.0, 1.0]; 5], 10.0, BorderMode::Unbordered).unwrap();
        for _ in 0..100 {
            assert_eq!(m.sample_individual(&mut rng).values, vec![2; 5]);
        }
        let m = FrequencyMatrix::<f64>::from_numerators(vec![vec![4, 0]; 5], 4).unwrap();
        for _ in 0..100 {
            assert_eq!(m.sample_individual(&mut rng).values, vec![0; 5]);
        }
    }

    #[test]
    fn unbordered_example_step() {
        let mut row = [0.5, 0.5];
        let out = update_row_unbordered(&mut row, 1, 0, 10.0).unwrap();
        assert!(close(row[0], 0.4) && close(row[1], 0.6));
        assert!(out.changed);
        assert!(close(out.effective_winner_increment, 0.1));
    }

    #[test]
    fn unbordered_tie_leaves_row() {
        let mut row = [0.25, 0.75];
        let out = update_row_unbordered(&mut row, 1, 1, 10.0).unwrap();
        assert_eq!(row, [0.25, 0.75]);
        assert!(!out.changed);
        let mut exact = [1, 3];
        assert!(!update_row_exact(&mut exact, 0, 0).unwrap());
        assert_eq!(exact, [1, 3]);
    }

    #[test]
    fn exact_quarter_step() {
        let mut row = [1, 1, 1, 1];
        assert!(update_row_exact(&mut row, 3, 0).unwrap());
        assert_eq!(row, [0, 1, 1, 2]);
        assert_eq!(update_row_exact(&mut row, 1, 0), Err(ModelError::Unsampleable(0)));
        let mut float = [0.25, 0.25, 0.25, 0.25];
        update_row_unbordered(&mut float, 3, 0, 4.0).unwrap();
        assert_eq!(float, [0.0, 0.25, 0.25, 0.5]);
    }

    #[test]
    fn unbordered_negative_loser_is_clamped_and_renormalized() {
        // 1/3 - 66/200 leaves 1/300 < 1/K
        let mut row = [1.0 / 300.0, 0.5 - 1.0 / 600.0, 0.5 - 1.0 / 600.0];
        let out = update_row_unbordered(&mut row, 2, 0, 200.0).unwrap();
        assert!(out.clamped_negative && out.renormalized);
        assert_eq!(row[0], 0.0);
        assert!(close(row.iter().sum::<f64>(), 1.0));
        assert!(out.effective_winner_increment > 0.0 && out.effective_winner_increment <= 1.0 / 200.0);
    }

    #[test]
    fn unbordered_rejects_unsampleable_loser() {
        let mut row = [0.0, 1.0];
        assert_eq!(update_row_unbordered(&mut row, 1, 0, 10.0), Err(ModelError::Unsampleable(0)));
        assert!(matches!(
            update_row_unbordered(&mut row, 2, 0, 10.0),
            Err(ModelError::ValueOutOfRange { value: 2, r: 2 })
        ));
    }

    #[test]
    fn bordered_lower_clamp_takes_from_third_value() {
        let mut row = [0.05, 0.475, 0.475];
        let out = update_row_bordered(&mut row, 2, 0, 10, 100.0).unwrap();
        assert!(close(row[0], 0.05));
        assert!(close(row[1], 0.465));
        assert!(close(row[2], 0.485));
        assert!(close(out.effective_winner_increment, 0.01));
        assert!(out.lower_clamped);
    }

    #[test]
    fn bordered_winner_stops_at_upper_border() {
        let mut row = [0.105, 0.895];
        let out = update_row_bordered(&mut row, 1, 0, 10, 100.0).unwrap();
        assert!(close(row[1], 0.9));
        assert!(close(row[0], 0.1));
        assert!(close(out.effective_winner_increment, 0.005));
    }

    #[test]
    fn bordered_winner_near_upper_border_with_three_values() {
        let b = Borders::<f64>::new(100, 3);
        let mut row = [0.005, 0.015, 0.98];
        let out = update_row_bordered(&mut row, 2, 1, 100, 50.0).unwrap();
        assert!(close(row[2], b.upper));
        assert!(close(row[0], b.lower) && close(row[1], b.lower));
        assert!(close(out.effective_winner_increment, 0.01));
    }

    #[test]
    fn bordered_tie_leaves_row() {
        let mut row = [0.3, 0.3, 0.4];
        let out = update_row_bordered(&mut row, 1, 1, 10, 100.0).unwrap();
        assert_eq!(row, [0.3, 0.3, 0.4]);
        assert!(!out.changed);
    }

    #[test]
    fn matrix_update_tracks_diagnostics() {
        let mut m = FrequencyMatrix::<f64>::from_rows(vec![vec![0.05, 0.475, 0.475]], 100.0, BorderMode::Bordered);
        assert!(m.is_err(), "n = 1 has degenerate borders");
        m = FrequencyMatrix::from_rows(vec![vec![0.05, 0.475, 0.475]; 10], 100.0, BorderMode::Bordered);
        let mut m = m.unwrap();
        m.apply_update(&[2; 10], &[0; 10]).unwrap();
        assert_eq!(m.diagnostics().lower_clamps, 10);
        m.check_invariants().unwrap();
    }

    #[test]
    fn f32_matrix_works() {
        let mut rng = Pcg64Mcg::seed_from_u64(9);
        let mut m = FrequencyMatrix::<f32>::new(20, 3, 50.0, BorderMode::Bordered).unwrap();
        for _ in 0..2000 {
            let x = m.sample_individual(&mut rng).values;
            let y = m.sample_individual(&mut rng).values;
            m.apply_update(&x, &y).unwrap();
        }
        m.check_invariants().unwrap();
    }
}
