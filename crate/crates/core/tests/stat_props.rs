mod common;

use depcross::pipeline::LengthGroup;
use depcross::stats::{fisher_randomization_mean, kendall_tau, monte_carlo_p_tau};
use depcross::{Error, Execution, RandomSource};
use num_rational::Ratio;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use common::*;

fn tied_pairs(max_len: usize) -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
    (2..=max_len, 1i64..8).prop_flat_map(|(m, levels)| {
        (
            prop::collection::vec(0..levels, m),
            prop::collection::vec(0..levels, m),
        )
    })
}

proptest! {
    #[test]
    fn tau_matches_enumeration_at_any_size((x, y) in tied_pairs(200)) {
        let t = kendall_tau(&x, &y).unwrap();
        prop_assert_eq!((t.n_c, t.n_d, t.n_0), brute_kendall(&x, &y));
        prop_assert!(t.tau() >= Ratio::from_integer(-1) && t.tau() <= Ratio::from_integer(1));
    }

    #[test]
    fn tau_is_symmetric((x, y) in tied_pairs(120)) {
        prop_assert_eq!(kendall_tau(&x, &y).unwrap(), kendall_tau(&y, &x).unwrap());
    }

    #[test]
    fn tau_ignores_increasing_transforms((x, y) in tied_pairs(120), shift in -50i64..50, scale in 1i64..9) {
        let fx: Vec<i64> = x.iter().map(|&v| scale * v * v * v + shift).collect();
        prop_assert_eq!(kendall_tau(&fx, &y).unwrap(), kendall_tau(&x, &y).unwrap());
    }

    #[test]
    fn tau_ignores_joint_permutations((x, y) in tied_pairs(120), seed: u64) {
        let mut idx: Vec<usize> = (0..x.len()).collect();
        idx.shuffle(&mut RandomSource::new(seed).rng());
        let px: Vec<i64> = idx.iter().map(|&i| x[i]).collect();
        let py: Vec<i64> = idx.iter().map(|&i| y[i]).collect();
        prop_assert_eq!(kendall_tau(&px, &py).unwrap(), kendall_tau(&x, &y).unwrap());
    }
}

#[test]
fn tau_examples_and_errors() {
    let t = kendall_tau(&[5, 7, 7, 9], &[0, 1, 1, 2]).unwrap();
    assert_eq!((t.n_c, t.n_d, t.n_0), (5, 0, 6));
    assert_eq!(t.tau(), Ratio::new(5, 6));
    assert_eq!(kendall_tau(&[1, 2, 3], &[3, 2, 1]).unwrap().tau(), Ratio::from_integer(-1));
    assert_eq!(kendall_tau(&[1, 2, 3], &[4, 4, 4]).unwrap().tau(), Ratio::from_integer(0));
    assert!(matches!(kendall_tau(&[1], &[1]), Err(Error::Domain(_))));
    assert!(kendall_tau(&[1, 2], &[1, 2, 3]).is_err());
}

fn group(d: &[u64], c: &[u64]) -> LengthGroup {
    LengthGroup {
        n: 10,
        d: d.to_vec(),
        c: c.to_vec(),
    }
}

#[test]
fn monte_carlo_matches_exhaustive_permutations() {
    let mut rng = RandomSource::new(60).rng();
    let replicas = 20_000;
    for case in 0..12 {
        let m = rng.random_range(2..=6);
        let d: Vec<u64> = (0..m).map(|_| rng.random_range(3..12)).collect();
        let c: Vec<u64> = (0..m).map(|_| rng.random_range(0..3)).collect();
        let mut sorted = d.clone();
        sorted.sort();
        // pair C with D so that tau is as large as possible: observed tau >= 0
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&i| c[i]);
        let mut paired = vec![0; m];
        for (rank, &i) in order.iter().enumerate() {
            paired[i] = sorted[rank];
        }
        let di: Vec<i64> = paired.iter().map(|&v| v as i64).collect();
        let ci: Vec<i64> = c.iter().map(|&v| v as i64).collect();
        let exact = exact_nonneg_probability(&di, &ci);
        let t = monte_carlo_p_tau(&[group(&paired, &c)], replicas, &RandomSource::new(case), Execution::default())
            .unwrap();
        assert_eq!(t.observed_nonneg(), 1);
        let sd = (exact * (1.0 - exact) / replicas as f64).sqrt();
        assert!(
            (t.p_value() - exact).abs() <= 4.0 * sd + 1e-12,
            "case {case}: d={paired:?} c={c:?} p={} exact={exact}",
            t.p_value()
        );
    }
}

#[test]
fn monte_carlo_p_value_is_stable_across_seeds() {
    let mut rng = RandomSource::new(61).rng();
    let groups: Vec<LengthGroup> = (0..40)
        .map(|g| {
            let m = rng.random_range(2..=30);
            let c: Vec<u64> = (0..m).map(|_| rng.random_range(0..4)).collect();
            let d: Vec<u64> = c.iter().map(|&ci| 3 * ci + rng.random_range(5..20)).collect();
            LengthGroup { n: 5 + g, d, c }
        })
        .collect();
    let ps: Vec<f64> = (0..10)
        .map(|seed| {
            monte_carlo_p_tau(&groups, 10_000, &RandomSource::new(seed), Execution::default())
                .unwrap()
                .p_value()
        })
        .collect();
    let lo = ps.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(hi - lo < 0.03, "{ps:?}");
}

#[test]
fn monte_carlo_observed_split() {
    let groups = [
        group(&[4, 5, 6], &[0, 1, 2]),
        group(&[4, 5, 6], &[2, 1, 0]),
        group(&[4, 5, 6], &[0, 0, 0]),
        group(&[4, 4, 4], &[0, 1, 2]),
    ];
    let t = monte_carlo_p_tau(&groups, 100, &RandomSource::new(1), Execution::default()).unwrap();
    assert_eq!((t.observed_pos, t.observed_zero, t.groups), (1, 2, 4));
    assert_eq!(t.p_nonneg(), 0.75);
}

fn exhaustive_fisher(values: &[f64], subset: &[usize]) -> (f64, f64) {
    let k = subset.len();
    let mean = |s: &[usize]| s.iter().map(|&i| values[i]).sum::<f64>() / k as f64;
    let observed = mean(subset);
    let all = combinations(values.len(), k);
    let tol = 1e-9;
    let left = all.iter().filter(|s| mean(s) <= observed + tol).count();
    let right = all.iter().filter(|s| mean(s) >= observed - tol).count();
    (left as f64 / all.len() as f64, right as f64 / all.len() as f64)
}

#[test]
fn fisher_matches_exhaustive_enumeration() {
    let mut rng = RandomSource::new(70).rng();
    let replicas = 40_000;
    for case in 0..15 {
        let total = rng.random_range(3..=9);
        let k = rng.random_range(1..total);
        let values: Vec<f64> = (0..total).map(|_| rng.random_range(0..6) as f64 * 0.1).collect();
        let mut idx: Vec<usize> = (0..total).collect();
        idx.shuffle(&mut rng);
        let subset = &idx[..k];
        let (left, right) = exhaustive_fisher(&values, subset);
        let t = fisher_randomization_mean(&values, subset, replicas, &RandomSource::new(case), Execution::default())
            .unwrap();
        for (got, exact) in [(t.left(), left), (t.right(), right)] {
            let sd = (exact * (1.0 - exact) / replicas as f64).sqrt();
            assert!((got - exact).abs() <= 4.0 * sd + 1e-12, "case {case}: {got} vs {exact}");
        }
    }
}

#[test]
fn fisher_fixtures() {
    let exec = Execution::default();
    let (left, right) = exhaustive_fisher(&[1.0, 2.0, 3.0, 4.0], &[2, 3]);
    assert_eq!((left, right), (1.0, 1.0 / 6.0));

    let values = [0.3, 0.9, 0.1, 0.5, 0.2];
    let (_, right) = exhaustive_fisher(&values, &[1]);
    assert_eq!(right, 0.2);
    let t = fisher_randomization_mean(&values, &[1], 50_000, &RandomSource::new(2), exec).unwrap();
    assert_eq!(t.left(), 1.0);
    assert!((t.right() - 0.2).abs() < 4.0 * (0.16f64 / 50_000.0).sqrt());

    let flat = [0.4; 6];
    let t = fisher_randomization_mean(&flat, &[0, 3], 1000, &RandomSource::new(3), exec).unwrap();
    assert_eq!((t.left(), t.right()), (1.0, 1.0));

    assert!(matches!(
        fisher_randomization_mean(&values, &[], 10, &RandomSource::new(0), exec),
        Err(Error::Degenerate(_))
    ));
    assert!(matches!(
        fisher_randomization_mean(&values, &[0, 1, 2, 3, 4], 10, &RandomSource::new(0), exec),
        Err(Error::Degenerate(_))
    ));
}
