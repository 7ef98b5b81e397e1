//! Replicated runs with deterministic per-replication seeds.

use rayon::prelude::*;

use super::{replication_seed, run, EngineError, RunConfig, Termination};
use crate::scalar::Real;

/// Outcome of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunRecord {
    pub index: usize,
    pub seed: u64,
    pub found_optimum: bool,
    pub termination: Termination,
    pub iterations: u64,
}

/// Aggregate over replications. Iteration statistics cover successful runs
/// only; failures show up in `success_rate`.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub replications: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_iterations: Option<f64>,
    /// Sample standard deviation (zero for a single success).
    pub std_iterations: Option<f64>,
    pub median_iterations: Option<f64>,
    pub runs: Vec<RunRecord>,
}

impl BatchSummary {
    pub fn from_records(runs: Vec<RunRecord>) -> Self {
        let mut done: Vec<f64> = runs
            .iter()
            .filter(|r| r.found_optimum)
            .map(|r| r.iterations as f64)
            .collect();
        let successes = done.len();
        let (mean, std, median) = if done.is_empty() {
            (None, None, None)
        } else {
            let count = done.len() as f64;
            let mean = done.iter().sum::<f64>() / count;
            let std = if done.len() > 1 {
                (done.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0)).sqrt()
            } else {
                0.0
            };
            done.sort_by(f64::total_cmp);
            let mid = done.len() / 2;
            let median = if done.len() % 2 == 1 {
                done[mid]
            } else {
                (done[mid - 1] + done[mid]) / 2.0
            };
            (Some(mean), Some(std), Some(median))
        };
        BatchSummary {
            replications: runs.len(),
            successes,
            success_rate: if runs.is_empty() { 0.0 } else { successes as f64 / runs.len() as f64 },
            mean_iterations: mean,
            std_iterations: std,
            median_iterations: median,
            runs,
        }
    }
}

/// Runs `config.replications` independent runs; run `i` is seeded with
/// `replication_seed(config.base_seed, i)`. Runs execute on the rayon pool
/// and are reported in index order.
pub fn run_batch<T: Real>(config: &RunConfig<T>) -> Result<BatchSummary, EngineError> {
    config.validate()?;
    let mut single = config.clone();
    single.trace = None;
    let records = (0..config.replications)
        .into_par_iter()
        .map(|index| {
            let seed = replication_seed(config.base_seed, index as u64);
            run(&single, seed).map(|res| RunRecord {
                index,
                seed,
                found_optimum: res.found_optimum,
                termination: res.termination,
                iterations: res.iterations,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BatchSummary::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitness::FitnessKind;

    fn record(iterations: u64, found: bool) -> RunRecord {
        RunRecord {
            index: 0,
            seed: 0,
            found_optimum: found,
            termination: if found { Termination::Optimum } else { Termination::Budget },
            iterations,
        }
    }

    #[test]
    fn statistics_skip_failures() {
        let s = BatchSummary::from_records(vec![record(10, true), record(99, false), record(20, true), record(40, true)]);
        assert_eq!(s.successes, 3);
        assert_eq!(s.success_rate, 0.75);
        assert_eq!(s.mean_iterations, Some(70.0 / 3.0));
        assert_eq!(s.median_iterations, Some(20.0));
        let expected_std = ((10.0f64 - 70.0 / 3.0).powi(2) + (20.0f64 - 70.0 / 3.0).powi(2) + (40.0f64 - 70.0 / 3.0).powi(2)) / 2.0;
        assert!((s.std_iterations.unwrap() - expected_std.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn no_successes_gives_no_statistics() {
        let s = BatchSummary::from_records(vec![record(5, false)]);
        assert_eq!(s.success_rate, 0.0);
        assert_eq!(s.mean_iterations, None);
    }

    #[test]
    fn single_replication_mean_is_that_run() {
        let config = RunConfig::<f64>::new(10, 3, 30.0, FitnessKind::ROneMax).with_seed(11);
        let s = run_batch(&config).unwrap();
        let direct = run(&config, replication_seed(11, 0)).unwrap();
        assert_eq!(s.replications, 1);
        if direct.found_optimum {
            assert_eq!(s.mean_iterations, Some(direct.iterations as f64));
            assert_eq!(s.std_iterations, Some(0.0));
        }
    }

    #[test]
    fn batches_are_deterministic() {
        let config = RunConfig::<f64>::new(12, 3, 45.0, FitnessKind::GOneMax)
            .with_seed(3)
            .with_replications(8);
        assert_eq!(run_batch(&config).unwrap(), run_batch(&config).unwrap());
    }
}
