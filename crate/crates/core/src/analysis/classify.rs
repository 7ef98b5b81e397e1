//! Classification of a sampled pair into random-walk and biased steps at
//! one position, for the G-OneMax contribution.

use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    /// Position `i` cannot change the ranking; its frequency moves like a
    /// fair random walk.
    RandomWalk,
    /// Position `i` decides the ranking in favour of the larger value.
    Biased,
    /// `x_i = y_i`; no frequency at position `i` changes.
    Neutral,
}

/// Classifies the pair `(x, y)` at `position` from `D_i = sum_{j != i} (x_j - y_j)`.
///
/// `x_i = y_i` is neutral. Otherwise `D_i = 0` is biased, and so is
/// `D_i in {-(r-1), ..., -1, 1, ..., r-2}` with `y_i - x_i > D_i`. All other
/// cases, including `D_i >= r - 1` and `D_i < -(r-1)`, are random-walk steps.
pub fn classify_step(x: &[u32], y: &[u32], position: usize, r: usize) -> Result<StepKind, AnalysisError> {
    if x.len() != y.len() || position >= x.len() {
        return Err(AnalysisError::Precondition(format!(
            "position {position} with individuals of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    if let Some(&v) = x.iter().chain(y).find(|&&v| v as usize >= r) {
        return Err(AnalysisError::Precondition(format!("value {v} out of range for r = {r}")));
    }
    let (xi, yi) = (x[position] as i64, y[position] as i64);
    if xi == yi {
        return Ok(StepKind::Neutral);
    }
    let d: i64 = x
        .iter()
        .zip(y)
        .enumerate()
        .filter(|&(j, _)| j != position)
        .map(|(_, (&a, &b))| a as i64 - b as i64)
        .sum();
    let top = r as i64 - 1;
    let mixed = (-top..=-1).contains(&d) || (1..=top - 1).contains(&d);
    Ok(if d == 0 || (mixed && yi - xi > d) {
        StepKind::Biased
    } else {
        StepKind::RandomWalk
    })
}
