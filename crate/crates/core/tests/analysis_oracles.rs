//! Exact analysis results checked against brute-force enumeration of all
//! sampled pairs `(x, y)`.

use proptest::prelude::*;
use rand::SeedableRng;
use rcga::analysis::{
    classify_step, exact_di_distribution, exact_step_drift, mc_step_drift, mgf_subgaussian_check, StepKind,
};
use rcga::model::update_row_unbordered;
use rcga::{BorderMode, Contribution, FitnessFunction, FrequencyMatrix, SimRng};

/// Every vector of `{0..r}^n` with its probability under `m`.
fn support(m: &FrequencyMatrix<f64>) -> Vec<(Vec<u32>, f64)> {
    let (n, r) = (m.n(), m.r());
    let mut out = vec![(Vec::new(), 1.0)];
    for i in 0..n {
        let mut next = Vec::with_capacity(out.len() * r);
        for (prefix, p) in &out {
            for v in 0..r {
                let mut x = prefix.clone();
                x.push(v as u32);
                next.push((x, p * m.frequency(i, v)));
            }
        }
        out = next;
    }
    out
}

fn brute_di(m: &FrequencyMatrix<f64>, i: usize, c: &Contribution) -> std::collections::BTreeMap<i64, f64> {
    let r = m.r();
    let all = support(m);
    let mut masses = std::collections::BTreeMap::new();
    for (x, px) in &all {
        for (y, py) in &all {
            let d: i64 = (0..m.n())
                .filter(|&j| j != i)
                .map(|j| c.value(x[j], r) as i64 - c.value(y[j], r) as i64)
                .sum();
            *masses.entry(d).or_insert(0.0) += px * py;
        }
    }
    masses
}

fn brute_drift(m: &FrequencyMatrix<f64>, f: &FitnessFunction, i: usize) -> f64 {
    let r = m.r();
    let all = support(m);
    let mut total = 0.0;
    for (x, px) in &all {
        for (y, py) in &all {
            let (w, l) = if f.evaluate_int(x).unwrap() < f.evaluate_int(y).unwrap() { (y, x) } else { (x, y) };
            let mut row = m.row(i);
            let before = row[r - 1];
            update_row_unbordered(&mut row, w[i], l[i], m.k()).unwrap();
            total += px * py * (row[r - 1] - before);
        }
    }
    total
}

fn matrix(rows: Vec<Vec<f64>>, k: f64) -> FrequencyMatrix<f64> {
    FrequencyMatrix::from_rows(rows, k, BorderMode::Unbordered).unwrap()
}

fn rows_strategy(max_n: usize, max_r: usize, floor: f64) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_n, 2..=max_r).prop_flat_map(move |(n, r)| {
        proptest::collection::vec(proptest::collection::vec(0.05f64..1.0, r), n).prop_map(move |rows| {
            rows.into_iter()
                .map(|w| {
                    let s: f64 = w.iter().sum();
                    let free = 1.0 - floor * w.len() as f64;
                    w.iter().map(|x| floor + free * x / s).collect()
                })
                .collect()
        })
    })
}

#[test]
fn two_binary_positions_drift_by_enumeration() {
    // all 16 (x, y) outcomes at n = 2, r = 2
    let m = FrequencyMatrix::<f64>::new(2, 2, 10.0, BorderMode::Unbordered).unwrap();
    let f = FitnessFunction::r_onemax(2, 2).unwrap();
    let brute = brute_drift(&m, &f, 0);
    // x_0 = 1, y_0 = 0 (prob 1/4): x always wins, ties included.
    // x_0 = 0, y_0 = 1 (prob 1/4): x keeps winning only on the tie
    // x_1 = 1, y_1 = 0, so the drift is (1/4 + 1/4 (3/4 - 1/4)) / K.
    assert!((brute - 0.375 / 10.0).abs() < 1e-15);
    assert!((exact_step_drift(&m, &f, 0).unwrap() - brute).abs() < 1e-15);
    let mut rng = SimRng::seed_from_u64(11);
    let rep = mc_step_drift(&m, &f, 0, 100_000, &mut rng).unwrap();
    assert!(rep.agrees_with(brute), "{rep:?} vs {brute}");
}

#[test]
fn step_drift_at_fifty_positions_meets_bound() {
    let m = FrequencyMatrix::<f64>::new(50, 3, 1000.0, BorderMode::Unbordered).unwrap();
    let f = FitnessFunction::g_onemax(50, 3).unwrap();
    let mut rng = SimRng::seed_from_u64(5);
    let rep = mc_step_drift(&m, &f, 0, 10_000, &mut rng).unwrap();
    assert!(rep.satisfied, "{rep:?}");
}

#[test]
fn mc_zero_mass_matches_oracle_at_ten_positions() {
    let m = FrequencyMatrix::<f64>::new_float(10, 3, 100.0, BorderMode::Unbordered).unwrap();
    let exact = exact_di_distribution(&m, 3, &Contribution::Identity).unwrap().p_zero();
    let mut rng = SimRng::seed_from_u64(8);
    let rep = rcga::analysis::mc_di_zero(&m, 3, &Contribution::Identity, 100_000, &mut rng).unwrap();
    assert!(rep.agrees_with(exact));
}

#[test]
fn hundred_positions_zero_mass_above_bound() {
    let m = FrequencyMatrix::<f64>::new_float(100, 3, 100.0, BorderMode::Unbordered).unwrap();
    let mut rng = SimRng::seed_from_u64(9);
    let rep = rcga::analysis::mc_di_zero(&m, 0, &Contribution::Identity, 100_000, &mut rng).unwrap();
    assert!(rep.estimate >= 0.00632);
    assert!(rep.satisfied && !rep.small_n);
}

#[test]
fn classification_matches_ranking() {
    // Neutral and RandomWalk steps never depend on which of the two values
    // at position i is larger; Biased steps with D = 0 always favour it.
    let (n, r) = (3usize, 4usize);
    let f = FitnessFunction::g_onemax(n, r).unwrap();
    let values: Vec<Vec<u32>> = (0..(r as u32).pow(n as u32))
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let v = c % r as u32;
                    c /= r as u32;
                    v
                })
                .collect()
        })
        .collect();
    for x in &values {
        for y in &values {
            let kind = classify_step(x, y, 0, r).unwrap();
            let d: i64 = (1..n).map(|j| x[j] as i64 - y[j] as i64).sum();
            let x_wins = f.evaluate_int(x).unwrap() >= f.evaluate_int(y).unwrap();
            match kind {
                StepKind::Neutral => assert_eq!(x[0], y[0]),
                StepKind::Biased if d == 0 => assert_eq!(x_wins, x[0] > y[0]),
                StepKind::RandomWalk if d >= r as i64 - 1 || d < 1 - r as i64 => {
                    // the other positions decide alone
                    assert_eq!(x_wins, d > 0);
                }
                _ => {}
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn di_oracle_matches_enumeration(rows in rows_strategy(3, 3, 0.0), pos in 0usize..3) {
        let m = matrix(rows, 100.0);
        let i = pos % m.n();
        for c in [Contribution::Identity, Contribution::Indicator, Contribution::Table(
            (0..m.r() as u32).rev().collect(),
        )] {
            let exact = exact_di_distribution(&m, i, &c).unwrap();
            let brute = brute_di(&m, i, &c);
            for d in exact.support() {
                let b = brute.get(&d).copied().unwrap_or(0.0);
                prop_assert!((exact.mass(d) - b).abs() < 1e-12, "d={} exact={} brute={}", d, exact.mass(d), b);
            }
            prop_assert!((exact.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn di_distribution_is_symmetric(rows in rows_strategy(8, 5, 0.0)) {
        let m = matrix(rows, 100.0);
        let d = exact_di_distribution(&m, 0, &Contribution::Identity).unwrap();
        for x in d.support() {
            prop_assert!((d.mass(x) - d.mass(-x)).abs() < 1e-12);
        }
    }

    #[test]
    fn step_drift_oracle_matches_enumeration(rows in rows_strategy(3, 3, 0.02), kind in 0usize..2) {
        // every entry is at least 1/K, so no loser is clamped
        let m = matrix(rows, 50.0);
        let f = if kind == 0 {
            FitnessFunction::r_onemax(m.n(), m.r()).unwrap()
        } else {
            FitnessFunction::g_onemax(m.n(), m.r()).unwrap()
        };
        for i in 0..m.n() {
            let exact = exact_step_drift(&m, &f, i).unwrap();
            prop_assert!((exact - brute_drift(&m, &f, i)).abs() < 1e-14);
        }
    }

    #[test]
    fn mgf_holds_for_admissible_drift(p in 0.0f64..=1.0, t in 0.0f64..=1.0, s in 0.0f64..=1.0, k in 2.0f64..2000.0) {
        let z = p * (1.0 - p);
        let eps = t * 2.0 * z / k;
        let lambda = s * k;
        let c = mgf_subgaussian_check(p, eps, k, lambda).unwrap();
        let up = z + k * eps / 2.0;
        let down = z - k * eps / 2.0;
        let direct = up * (lambda * (1.0 / k - eps)).exp()
            + down * (lambda * (-1.0 / k - eps)).exp()
            + (1.0 - 2.0 * z) * (-lambda * eps).exp();
        prop_assert!((c.lhs - direct).abs() <= 1e-12 * direct.max(1.0));
        prop_assert!(c.satisfied, "{:?}", c);
    }
}
