//! Multi-valued OneMax objectives built from per-position contributions.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitnessError {
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("value {value} at position {position} out of range for r = {r}")]
    ValueOutOfRange { position: usize, value: u32, r: usize },
    #[error("contribution table has {got} entries, expected r = {r}")]
    TableLength { got: usize, r: usize },
    #[error("contribution {value} exceeds r - 1 = {max}")]
    ContributionTooLarge { value: u32, max: u32 },
    #[error("unknown fitness function '{0}' (expected r-onemax or g-onemax)")]
    UnknownId(String),
    #[error("value count r must be at least 2, got {0}")]
    TooFewValues(usize),
}

/// Identifier of the two built-in objectives, as used on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitnessKind {
    /// Number of positions holding `r - 1`.
    ROneMax,
    /// Sum of all position values.
    GOneMax,
}

impl FitnessKind {
    pub fn id(self) -> &'static str {
        match self {
            FitnessKind::ROneMax => "r-onemax",
            FitnessKind::GOneMax => "g-onemax",
        }
    }

    pub fn contribution(self) -> Contribution {
        match self {
            FitnessKind::ROneMax => Contribution::Indicator,
            FitnessKind::GOneMax => Contribution::Identity,
        }
    }
}

impl fmt::Display for FitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FitnessKind {
    type Err = FitnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "r-onemax" => Ok(FitnessKind::ROneMax),
            "g-onemax" => Ok(FitnessKind::GOneMax),
            other => Err(FitnessError::UnknownId(other.to_string())),
        }
    }
}

/// Per-position map from a value to its integer fitness contribution.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Contribution {
    /// `1{v = r - 1}`.
    Indicator,
    /// `v`.
    Identity,
    /// Arbitrary table with entries in `[0, r - 1]`.
    Table(Vec<u32>),
}

impl Contribution {
    pub fn table(values: Vec<u32>) -> Result<Self, FitnessError> {
        let r = values.len();
        if r < 2 {
            return Err(FitnessError::TooFewValues(r));
        }
        let max = r as u32 - 1;
        if let Some(&value) = values.iter().find(|&&v| v > max) {
            return Err(FitnessError::ContributionTooLarge { value, max });
        }
        Ok(Contribution::Table(values))
    }

    #[inline]
    pub fn value(&self, v: u32, r: usize) -> u32 {
        match self {
            Contribution::Indicator => (v as usize == r - 1) as u32,
            Contribution::Identity => v,
            Contribution::Table(t) => t[v as usize],
        }
    }

    /// Largest contribution over `0..r`.
    pub fn max_value(&self, r: usize) -> u32 {
        (0..r as u32).map(|v| self.value(v, r)).max().unwrap_or(0)
    }

    /// Values attaining the largest contribution.
    pub fn optimal_values(&self, r: usize) -> Vec<u32> {
        let best = self.max_value(r);
        (0..r as u32).filter(|&v| self.value(v, r) == best).collect()
    }

    fn check(&self, r: usize) -> Result<(), FitnessError> {
        if r < 2 {
            return Err(FitnessError::TooFewValues(r));
        }
        match self {
            Contribution::Table(t) if t.len() != r => Err(FitnessError::TableLength { got: t.len(), r }),
            _ => Ok(()),
        }
    }
}

/// A separable objective `f(x) = sum_i c(x_i)` over `{0, ..., r-1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FitnessFunction {
    n: usize,
    r: usize,
    contribution: Contribution,
    max_fitness: u64,
}

impl FitnessFunction {
    pub fn new(n: usize, r: usize, contribution: Contribution) -> Result<Self, FitnessError> {
        contribution.check(r)?;
        let max_fitness = n as u64 * contribution.max_value(r) as u64;
        Ok(FitnessFunction { n, r, contribution, max_fitness })
    }

    pub fn of_kind(kind: FitnessKind, n: usize, r: usize) -> Result<Self, FitnessError> {
        Self::new(n, r, kind.contribution())
    }

    pub fn r_onemax(n: usize, r: usize) -> Result<Self, FitnessError> {
        Self::of_kind(FitnessKind::ROneMax, n, r)
    }

    pub fn g_onemax(n: usize, r: usize) -> Result<Self, FitnessError> {
        Self::of_kind(FitnessKind::GOneMax, n, r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn contribution(&self) -> &Contribution {
        &self.contribution
    }

    pub fn max_fitness_int(&self) -> u64 {
        self.max_fitness
    }

    pub fn max_fitness<T: Real>(&self) -> T {
        T::of(self.max_fitness as f64)
    }

    /// Integer fitness, validating length and value range.
    pub fn evaluate_int(&self, x: &[u32]) -> Result<u64, FitnessError> {
        if x.len() != self.n {
            return Err(FitnessError::Length { expected: self.n, got: x.len() });
        }
        if let Some((position, &value)) = x.iter().enumerate().find(|(_, &v)| v as usize >= self.r) {
            return Err(FitnessError::ValueOutOfRange { position, value, r: self.r });
        }
        Ok(self.evaluate_unchecked(x))
    }

    pub fn evaluate<T: Real>(&self, x: &[u32]) -> Result<T, FitnessError> {
        self.evaluate_int(x).map(|f| T::of(f as f64))
    }

    /// Fitness of a vector already known to be in range (e.g. freshly sampled).
    #[inline]
    pub fn evaluate_unchecked(&self, x: &[u32]) -> u64 {
        let r = self.r;
        match &self.contribution {
            Contribution::Indicator => x.iter().filter(|&&v| v as usize == r - 1).count() as u64,
            Contribution::Identity => x.iter().map(|&v| v as u64).sum(),
            Contribution::Table(t) => x.iter().map(|&v| t[v as usize] as u64).sum(),
        }
    }

    pub fn is_optimal<T: Real>(&self, fitness: T) -> bool {
        fitness == self.max_fitness::<T>()
    }

    /// The all-`(r-1)`s vector for both built-in objectives.
    pub fn optimum(&self) -> Vec<u32> {
        let best = *self.contribution.optimal_values(self.r).last().expect("r >= 2");
        vec![best; self.n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn optimum_fitness() {
        for r in 2..6 {
            let f = FitnessFunction::r_onemax(7, r).unwrap();
            let g = FitnessFunction::g_onemax(7, r).unwrap();
            let opt = vec![r as u32 - 1; 7];
            assert_eq!(f.optimum(), opt);
            assert_eq!(g.optimum(), opt);
            assert_eq!(f.evaluate::<f64>(&opt).unwrap(), 7.0);
            assert_eq!(g.evaluate::<f64>(&opt).unwrap(), 7.0 * (r as f64 - 1.0));
        }
    }

    #[test]
    fn small_examples() {
        let f = FitnessFunction::r_onemax(3, 3).unwrap();
        assert_eq!(f.evaluate_int(&[2, 1, 2]).unwrap(), 2);
        let g = FitnessFunction::g_onemax(3, 3).unwrap();
        assert_eq!(g.evaluate_int(&[2, 1, 0]).unwrap(), 3);
    }

    #[test]
    fn optimality() {
        let f = FitnessFunction::r_onemax(5, 3).unwrap();
        assert!(f.is_optimal(5.0_f64));
        assert!(!f.is_optimal(4.0_f64));
        let g = FitnessFunction::g_onemax(5, 3).unwrap();
        assert!(g.is_optimal(10.0_f64));
    }

    #[test]
    fn rejects_bad_input() {
        let f = FitnessFunction::g_onemax(3, 3).unwrap();
        assert_eq!(
            f.evaluate_int(&[0, 3, 1]),
            Err(FitnessError::ValueOutOfRange { position: 1, value: 3, r: 3 })
        );
        assert_eq!(f.evaluate_int(&[0, 1]), Err(FitnessError::Length { expected: 3, got: 2 }));
        assert!(FitnessFunction::g_onemax(3, 1).is_err());
        assert!(Contribution::table(vec![0, 5, 1]).is_err());
        assert!(FitnessFunction::new(3, 4, Contribution::table(vec![0, 1, 2]).unwrap()).is_err());
    }

    #[test]
    fn ids_round_trip() {
        for kind in [FitnessKind::ROneMax, FitnessKind::GOneMax] {
            assert_eq!(kind.id().parse::<FitnessKind>().unwrap(), kind);
        }
        assert!("onemax".parse::<FitnessKind>().is_err());
    }

    #[test]
    fn table_contribution() {
        let f = FitnessFunction::new(2, 3, Contribution::table(vec![1, 0, 2]).unwrap()).unwrap();
        assert_eq!(f.max_fitness_int(), 4);
        assert_eq!(f.evaluate_int(&[0, 1]).unwrap(), 1);
        assert_eq!(f.optimum(), vec![2, 2]);
    }

    fn vector(n: usize, r: u32) -> impl Strategy<Value = Vec<u32>> {
        proptest::collection::vec(0..r, n)
    }

    proptest! {
        #[test]
        fn binary_variants_coincide(x in vector(12, 2)) {
            let f = FitnessFunction::r_onemax(12, 2).unwrap();
            let g = FitnessFunction::g_onemax(12, 2).unwrap();
            prop_assert_eq!(f.evaluate_int(&x).unwrap(), g.evaluate_int(&x).unwrap());
        }

        #[test]
        fn g_onemax_is_monotone(x in vector(8, 5), i in 0usize..8) {
            let g = FitnessFunction::g_onemax(8, 5).unwrap();
            let mut y = x.clone();
            if y[i] < 4 {
                y[i] += 1;
                prop_assert!(g.evaluate_int(&y).unwrap() > g.evaluate_int(&x).unwrap());
            }
        }

        #[test]
        fn r_onemax_ignores_suboptimal_labels(x in vector(8, 5), shift in 1u32..4) {
            // cyclically relabel values 0..=3 at every position
            let f = FitnessFunction::r_onemax(8, 5).unwrap();
            let y: Vec<u32> = x.iter().map(|&v| if v < 4 { (v + shift) % 4 } else { v }).collect();
            prop_assert_eq!(f.evaluate_int(&x).unwrap(), f.evaluate_int(&y).unwrap());
        }

        #[test]
        fn max_fitness_bounds_everything(x in vector(6, 4)) {
            for f in [FitnessFunction::r_onemax(6, 4).unwrap(), FitnessFunction::g_onemax(6, 4).unwrap()] {
                prop_assert!(f.evaluate_int(&x).unwrap() <= f.max_fitness_int());
            }
        }
    }
}
