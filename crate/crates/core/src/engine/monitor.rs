//! Genetic-drift excursion monitoring.
//!
//! For a reference level `L` (typically `k/r`), an excursion at a position is
//! the first time its frequency of value `r - 1` falls below `L - 1/(2r)`
//! after having been at least `L`.

use crate::scalar::Real;

/// Slack for deciding that a level has been reached, so that an initial
/// frequency of exactly `1/r` reaches the level `1/r`.
const REACH_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftExcursion<T> {
    pub position: usize,
    /// Reference level that was reached first.
    pub level: T,
    /// `level - 1/(2r)`.
    pub threshold: T,
    pub iteration: u64,
}

/// Online monitor over all positions and levels.
#[derive(Debug, Clone)]
pub struct ExcursionMonitor<T> {
    levels: Vec<T>,
    drop: T,
    // per (position, level): 0 = not reached, 1 = armed, 2 = recorded
    state: Vec<u8>,
    excursions: Vec<DriftExcursion<T>>,
}

impl<T: Real> ExcursionMonitor<T> {
    pub fn new(n: usize, r: usize, levels: Vec<T>) -> Self {
        let state = vec![0; n * levels.len()];
        ExcursionMonitor {
            drop: T::one() / (T::of(2.0) * T::of_usize(r)),
            levels,
            state,
            excursions: Vec::new(),
        }
    }

    /// The levels `k/r` for `k = 1, ..., r-1`.
    pub fn standard_levels(r: usize) -> Vec<T> {
        (1..r).map(|k| T::of_usize(k) / T::of_usize(r)).collect()
    }

    pub fn observe(&mut self, iteration: u64, position: usize, frequency: T) {
        let width = self.levels.len();
        for (l, &level) in self.levels.iter().enumerate() {
            let state = &mut self.state[position * width + l];
            match *state {
                0 if frequency >= level - T::of(REACH_SLACK) => *state = 1,
                1 if frequency < level - self.drop => {
                    *state = 2;
                    self.excursions.push(DriftExcursion {
                        position,
                        level,
                        threshold: level - self.drop,
                        iteration,
                    });
                }
                _ => {}
            }
        }
    }

    pub fn excursions(&self) -> &[DriftExcursion<T>] {
        &self.excursions
    }

    pub fn into_excursions(self) -> Vec<DriftExcursion<T>> {
        self.excursions
    }
}

/// Excursions in a recorded `(iteration, frequency)` series of one position.
pub fn monitor_excursions<T: Real>(
    series: &[(u64, T)],
    position: usize,
    r: usize,
    levels: &[T],
) -> Vec<DriftExcursion<T>> {
    let mut monitor = ExcursionMonitor::new(position + 1, r, levels.to_vec());
    for &(iteration, frequency) in series {
        monitor.observe(iteration, position, frequency);
    }
    monitor.into_excursions()
}
