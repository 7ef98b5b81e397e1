//! The r-cGA main loop: sampling two offspring, ranking them, updating the
//! model, and stopping as soon as an optimal offspring is sampled.

mod batch;
mod monitor;
mod seed;

pub use batch::{run_batch, BatchSummary, RunRecord};
pub use monitor::{monitor_excursions, DriftExcursion, ExcursionMonitor};
pub use seed::{derive_seed, replication_seed, splitmix64, SEED_GAMMA};

use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::fitness::{FitnessError, FitnessFunction, FitnessKind};
use crate::model::{BorderMode, FrequencyMatrix, Individual, ModelDiagnostics, ModelError};
use crate::scalar::Real;
use crate::SimRng;

pub const DEFAULT_MAX_ITERATIONS: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Fitness(#[from] FitnessError),
    #[error("invalid run configuration: {0}")]
    Config(String),
}

/// Which position to record and how often.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceSpec {
    pub position: usize,
    pub stride: u64,
}

impl TraceSpec {
    pub fn every_iteration(position: usize) -> Self {
        TraceSpec { position, stride: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig<T> {
    pub n: usize,
    pub r: usize,
    /// Hypothetical population size; frequencies move by `1/K` per step.
    pub k: T,
    pub fitness: FitnessKind,
    pub borders: BorderMode,
    pub base_seed: u64,
    pub replications: usize,
    pub max_iterations: u64,
    pub trace: Option<TraceSpec>,
    /// Reference levels for the drift-excursion monitor.
    pub monitor: Option<Vec<T>>,
    /// Stop once some position can no longer produce an optimal value
    /// (unbordered runs only; such a run can never succeed).
    pub stop_when_unreachable: bool,
}

impl<T: Real> RunConfig<T> {
    pub fn new(n: usize, r: usize, k: T, fitness: FitnessKind) -> Self {
        RunConfig {
            n,
            r,
            k,
            fitness,
            borders: BorderMode::Unbordered,
            base_seed: 0,
            replications: 1,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            trace: None,
            monitor: None,
            stop_when_unreachable: true,
        }
    }

    pub fn with_borders(mut self, borders: BorderMode) -> Self {
        self.borders = borders;
        self
    }

    pub fn with_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    pub fn with_replications(mut self, replications: usize) -> Self {
        self.replications = replications;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: u64) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_trace(mut self, trace: TraceSpec) -> Self {
        self.trace = Some(trace);
        self
    }

    pub fn with_monitor(mut self, levels: Vec<T>) -> Self {
        self.monitor = Some(levels);
        self
    }

    pub fn with_stop_when_unreachable(mut self, stop: bool) -> Self {
        self.stop_when_unreachable = stop;
        self
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.max_iterations == 0 {
            return Err(EngineError::Config("max_iterations must be at least 1".into()));
        }
        if self.replications == 0 {
            return Err(EngineError::Config("replications must be at least 1".into()));
        }
        if let Some(trace) = self.trace {
            if trace.position >= self.n {
                return Err(EngineError::Config(format!(
                    "trace position {} out of range for n = {}",
                    trace.position, self.n
                )));
            }
            if trace.stride == 0 {
                return Err(EngineError::Config("trace stride must be at least 1".into()));
            }
        }
        Ok(())
    }

    pub fn fitness_function(&self) -> Result<FitnessFunction, EngineError> {
        Ok(FitnessFunction::of_kind(self.fitness, self.n, self.r)?)
    }

    pub fn initial_matrix(&self) -> Result<FrequencyMatrix<T>, EngineError> {
        Ok(FrequencyMatrix::new(self.n, self.r, self.k, self.borders)?)
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Optimum,
    Budget,
    /// Some position lost all probability on its optimal values.
    Unreachable,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::Optimum => "optimum",
            Termination::Budget => "budget",
            Termination::Unreachable => "unreachable",
        })
    }
}

/// One recorded row of the traced position. `iteration` counts the model
/// updates applied so far, so the initial model is iteration 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord<T> {
    pub iteration: u64,
    pub row: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult<T> {
    pub seed: u64,
    pub found_optimum: bool,
    pub termination: Termination,
    /// Iterations started, including the one that sampled the optimum.
    pub iterations: u64,
    /// Two per iteration.
    pub evaluations: u64,
    pub best: Individual<T>,
    pub best_fitness: T,
    pub trace: Option<Vec<TraceRecord<T>>>,
    pub excursions: Vec<DriftExcursion<T>>,
    pub diagnostics: ModelDiagnostics,
}

/// The two offspring of one iteration, ordered as winner and loser.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<T> {
    pub winner: Individual<T>,
    pub loser: Individual<T>,
}

/// Samples `x` and `y`, swaps them if `f(x) < f(y)` (ties keep `x` as the
/// winner) and updates every row with the winner's and loser's value.
pub fn step<T: Real, R: Rng + ?Sized>(
    matrix: &mut FrequencyMatrix<T>,
    fitness: &FitnessFunction,
    rng: &mut R,
) -> Result<StepOutcome<T>, EngineError> {
    check_shapes(matrix, fitness)?;
    let mut x = matrix.sample_individual(rng);
    let mut y = matrix.sample_individual(rng);
    x.fitness = fitness.evaluate(&x.values)?;
    y.fitness = fitness.evaluate(&y.values)?;
    let (winner, loser) = if x.fitness < y.fitness { (y, x) } else { (x, y) };
    matrix.apply_update(&winner.values, &loser.values)?;
    Ok(StepOutcome { winner, loser })
}

fn check_shapes<T: Real>(matrix: &FrequencyMatrix<T>, fitness: &FitnessFunction) -> Result<(), EngineError> {
    if matrix.n() != fitness.n() || matrix.r() != fitness.r() {
        return Err(EngineError::Config(format!(
            "matrix is {}x{} but the fitness function expects {}x{}",
            matrix.n(),
            matrix.r(),
            fitness.n(),
            fitness.r()
        )));
    }
    Ok(())
}

/// One run from the uniform model with the generator seeded by `seed`.
pub fn run<T: Real>(config: &RunConfig<T>, seed: u64) -> Result<RunResult<T>, EngineError> {
    config.validate()?;
    let fitness = config.fitness_function()?;
    run_from(config.initial_matrix()?, &fitness, config, seed)
}

/// One run starting from `matrix` (e.g. a warm start). Only the budget,
/// trace, monitor and unreachability settings of `config` are used.
pub fn run_from<T: Real>(
    mut matrix: FrequencyMatrix<T>,
    fitness: &FitnessFunction,
    config: &RunConfig<T>,
    seed: u64,
) -> Result<RunResult<T>, EngineError> {
    config.validate()?;
    check_shapes(&matrix, fitness)?;
    if let Some(trace) = config.trace {
        if trace.position >= matrix.n() {
            return Err(EngineError::Config(format!("trace position {} out of range", trace.position)));
        }
    }
    let mut rng = SimRng::seed_from_u64(seed);
    let (n, r) = (matrix.n(), matrix.r());
    let max_fitness = fitness.max_fitness_int();
    let optimal_values = fitness.contribution().optimal_values(r);
    let watch_reachability = config.stop_when_unreachable && !matrix.mode().is_bordered();

    let mut trace = config.trace.map(|spec| {
        vec![TraceRecord {
            iteration: 0,
            row: matrix.row(spec.position),
        }]
    });
    let mut monitor = config
        .monitor
        .as_ref()
        .map(|levels| ExcursionMonitor::new(n, r, levels.clone()));
    if let Some(monitor) = monitor.as_mut() {
        for i in 0..n {
            monitor.observe(0, i, matrix.top_frequency(i));
        }
    }

    let position_dead = |matrix: &FrequencyMatrix<T>, i: usize| {
        optimal_values
            .iter()
            .all(|&v| matrix.frequency(i, v as usize) == T::zero())
    };
    let dead_at_start = watch_reachability && (0..n).any(|i| position_dead(&matrix, i));

    let mut x = vec![0u32; n];
    let mut y = vec![0u32; n];
    let mut best_values = Vec::new();
    let mut best_fitness = 0u64;
    let mut termination = Termination::Budget;
    let mut iterations = config.max_iterations;
    let mut updates = 0u64;
    if dead_at_start {
        termination = Termination::Unreachable;
        iterations = 0;
    }

    for t in (1..=config.max_iterations).filter(|_| !dead_at_start) {
        matrix.sample_into(&mut rng, &mut x);
        matrix.sample_into(&mut rng, &mut y);
        let fx = fitness.evaluate_unchecked(&x);
        let fy = fitness.evaluate_unchecked(&y);
        if best_values.is_empty() || fx.max(fy) > best_fitness {
            best_fitness = fx.max(fy);
            best_values = if fx >= fy { x.clone() } else { y.clone() };
        }
        if best_fitness == max_fitness {
            termination = Termination::Optimum;
            iterations = t;
            break;
        }
        let (winner, loser) = if fx < fy { (&y, &x) } else { (&x, &y) };
        matrix.apply_update(winner, loser)?;
        updates = t;

        if let (Some(spec), Some(records)) = (config.trace, trace.as_mut()) {
            if t % spec.stride == 0 {
                records.push(TraceRecord {
                    iteration: t,
                    row: matrix.row(spec.position),
                });
            }
        }
        if let Some(monitor) = monitor.as_mut() {
            for i in 0..n {
                monitor.observe(t, i, matrix.top_frequency(i));
            }
        }
        if watch_reachability {
            let dead = (0..n).any(|i| {
                winner[i] != loser[i] && optimal_values.contains(&loser[i]) && position_dead(&matrix, i)
            });
            if dead {
                termination = Termination::Unreachable;
                iterations = t;
                break;
            }
        }
    }

    if let (Some(spec), Some(records)) = (config.trace, trace.as_mut()) {
        if records.last().map(|rec| rec.iteration) != Some(updates) {
            records.push(TraceRecord {
                iteration: updates,
                row: matrix.row(spec.position),
            });
        }
    }

    let best_fitness_t = T::of(best_fitness as f64);
    Ok(RunResult {
        seed,
        found_optimum: termination == Termination::Optimum,
        termination,
        iterations,
        evaluations: 2 * iterations,
        best: Individual {
            values: best_values,
            fitness: best_fitness_t,
        },
        best_fitness: best_fitness_t,
        trace,
        excursions: monitor.map(ExcursionMonitor::into_excursions).unwrap_or_default(),
        diagnostics: matrix.diagnostics(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_optimum_matrix_does_not_move() {
        let mut m = FrequencyMatrix::<f64>::from_numerators(vec![vec![0, 0, 6]; 4], 6).unwrap();
        let before = m.clone();
        let f = FitnessFunction::r_onemax(4, 3).unwrap();
        let mut rng = SimRng::seed_from_u64(1);
        let out = step(&mut m, &f, &mut rng).unwrap();
        assert_eq!(out.winner.values, vec![2; 4]);
        assert_eq!(out.loser.values, vec![2; 4]);
        assert_eq!(out.winner.fitness, out.loser.fitness);
        assert_eq!(m, before);
    }

    #[test]
    fn warm_start_at_optimum_stops_after_one_iteration() {
        let m = FrequencyMatrix::<f64>::from_numerators(vec![vec![0, 0, 3]; 10], 3).unwrap();
        let f = FitnessFunction::g_onemax(10, 3).unwrap();
        let config = RunConfig::new(10, 3, 3.0, FitnessKind::GOneMax);
        let res = run_from(m, &f, &config, 5).unwrap();
        assert!(res.found_optimum);
        assert_eq!(res.iterations, 1);
        assert_eq!(res.evaluations, 2);
        assert_eq!(res.best.values, vec![2; 10]);
    }

    #[test]
    fn budget_exhaustion_is_a_result() {
        let config = RunConfig::<f64>::new(30, 3, 300.0, FitnessKind::ROneMax).with_max_iterations(5);
        let res = run(&config, 1).unwrap();
        assert!(!res.found_optimum);
        assert_eq!(res.termination, Termination::Budget);
        assert_eq!(res.iterations, 5);
        assert_eq!(res.evaluations, 10);
    }

    #[test]
    fn identical_seeds_give_identical_results() {
        let config = RunConfig::<f64>::new(20, 3, 60.0, FitnessKind::GOneMax)
            .with_trace(TraceSpec::every_iteration(3))
            .with_monitor(ExcursionMonitor::standard_levels(3));
        assert_eq!(run(&config, 99).unwrap(), run(&config, 99).unwrap());
    }

    #[test]
    fn trace_records_initial_and_final_state() {
        let config = RunConfig::<f64>::new(10, 3, 30.0, FitnessKind::ROneMax).with_trace(TraceSpec {
            position: 2,
            stride: 7,
        });
        let res = run(&config, 4).unwrap();
        let trace = res.trace.unwrap();
        assert_eq!(trace[0].iteration, 0);
        assert!(trace[0].row.iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-15));
        let last = trace.last().unwrap();
        let updates = if res.found_optimum { res.iterations - 1 } else { res.iterations };
        assert_eq!(last.iteration, updates);
        assert!(trace.windows(2).all(|w| w[0].iteration < w[1].iteration));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = RunConfig::<f64>::new(5, 3, 30.0, FitnessKind::ROneMax);
        assert!(run(&base.clone().with_max_iterations(0), 0).is_err());
        assert!(run(&base.clone().with_trace(TraceSpec::every_iteration(5)), 0).is_err());
        assert!(matches!(
            run(&RunConfig::<f64>::new(5, 1, 30.0, FitnessKind::ROneMax), 0),
            Err(EngineError::Fitness(_))
        ));
    }

    #[test]
    fn unreachable_runs_stop_early() {
        // position 0 has no mass on value 2 and can never produce it
        let m = FrequencyMatrix::<f64>::from_numerators(vec![vec![3, 3, 0], vec![2, 2, 2]], 6).unwrap();
        let f = FitnessFunction::r_onemax(2, 3).unwrap();
        let config = RunConfig::new(2, 3, 6.0, FitnessKind::ROneMax).with_max_iterations(1000);
        let res = run_from(m, &f, &config, 3).unwrap();
        assert!(!res.found_optimum);
        assert_eq!(res.termination, Termination::Unreachable);
        assert_eq!(res.iterations, 0);

        // the top value of position 0 loses its last unit of mass
        let m = FrequencyMatrix::<f64>::from_numerators(vec![vec![5, 0, 1], vec![0, 0, 6]], 6).unwrap();
        let res = run_from(m, &f, &config, 3).unwrap();
        assert!(res.found_optimum || res.termination == Termination::Unreachable);
        if !res.found_optimum {
            assert!(res.iterations < 1000);
        }
    }
}
