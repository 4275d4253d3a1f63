//! Oracle checks for the dissimilarity measures: the optimized rolling
//! implementation against the literal nested-loop form, plus property tests
//! for the metric axioms the measure must satisfy.

mod common;

use common::{
    literal_model_dissimilarity, literal_path_dissimilarity, random_generated_path, seeded_rng,
};
use covclust::dissim::{empirical_cov, empirical_mean, frobenius_distance};
use covclust::{
    model_dissimilarity, path_dissimilarity, AnalyticCovModel, DissimConfig, Matrix, SamplePath,
    WindowRule,
};
use proptest::collection::vec as pvec;
use proptest::prelude::*;
use rand::Rng;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn moments_match_literal_oracle() {
    let mut rng = seeded_rng(11);
    for _ in 0..50 {
        let n = rng.random_range(4..30);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let x = SamplePath::new("x", values.clone());
        let m = rng.random_range(1..=3.min(n - 1));
        let l = rng.random_range(1..=(n - m + 1));
        let mean = empirical_mean(&x, l, m).unwrap();
        let lit_mean = common::literal_mean(&values, n, l, m);
        for (a, b) in mean.iter().zip(&lit_mean) {
            assert!((a - b).abs() < 1e-12);
        }
        let cov = empirical_cov(&x, l, m).unwrap();
        let lit_cov = common::literal_cov(&values, n, l, m);
        for i in 0..m {
            for j in 0..m {
                assert!((cov.get(i, j) - lit_cov[i][j]).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn frobenius_matches_elementwise_oracle() {
    let mut rng = seeded_rng(13);
    for _ in 0..20 {
        let a: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..3).map(|_| rng.random_range(-4.0..4.0)).collect())
            .collect();
        let b: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..3).map(|_| rng.random_range(-4.0..4.0)).collect())
            .collect();
        let mut expect = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = a[i][j] - b[i][j];
                expect += d * d;
            }
        }
        let got =
            frobenius_distance(&Matrix::from_rows(a.clone()), &Matrix::from_rows(b.clone()))
                .unwrap();
        assert!((got - expect.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn reversed_ramp_matches_literal_oracle() {
    let a = SamplePath::new("a", vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    let b = SamplePath::new("b", vec![5.0, 4.0, 3.0, 2.0, 1.0]);
    let cfg = DissimConfig::default();
    let opt = path_dissimilarity(&a, &b, &cfg).unwrap();
    let lit = literal_path_dissimilarity(&a.values, &b.values, &cfg);
    assert!(rel_close(opt, lit, 1e-12));
    assert!((lit - 37.0 / 120.0).abs() < 1e-12);
}

#[test]
fn optimized_matches_literal_on_generated_paths() {
    // Covers plain, mean-free and log-transformed configurations, plus the
    // fixed window rule, on generator output of mixed lengths.
    let mut rng = seeded_rng(17);
    let configs = [
        DissimConfig::default(),
        DissimConfig::default().with_log_star(true),
        DissimConfig { include_mean_term: false, ..DissimConfig::default() },
        DissimConfig { window_rule: WindowRule::Fixed(3), ..DissimConfig::default() },
    ];
    for round in 0..30 {
        let n1 = rng.random_range(3..=60);
        let n2 = rng.random_range(3..=60);
        let x1 = random_generated_path(&mut rng, "a", n1);
        let x2 = random_generated_path(&mut rng, "b", n2);
        let cfg = &configs[round % configs.len()];
        let opt = path_dissimilarity(&x1, &x2, cfg).unwrap();
        let lit = literal_path_dissimilarity(&x1.values, &x2.values, cfg);
        assert!(
            rel_close(opt, lit, 1e-10),
            "round {round}: optimized {opt} vs literal {lit}"
        );
    }
}

#[test]
fn model_dissimilarity_matches_literal_double_sum() {
    let cfg = DissimConfig::default();
    let fgn_a = AnalyticCovModel::fgn(0.3, 1.0).unwrap();
    let fgn_b = AnalyticCovModel::fgn(0.7, 1.0).unwrap();
    let got = model_dissimilarity(&fgn_a, &fgn_b, 10, &cfg);
    let lit = literal_model_dissimilarity(&fgn_a, &fgn_b, 10, &cfg);
    assert!(rel_close(got, lit, 1e-12), "fgn: {got} vs {lit}");
    assert!(got > 0.0);

    let ar_a = AnalyticCovModel::ar1(0.1).unwrap();
    let ar_b = AnalyticCovModel::ar1(0.6).unwrap();
    let got = model_dissimilarity(&ar_a, &ar_b, 10, &cfg);
    let lit = literal_model_dissimilarity(&ar_a, &ar_b, 10, &cfg);
    assert!(rel_close(got, lit, 1e-12), "ar1: {got} vs {lit}");

    // log-transformed variant too
    let log_cfg = DissimConfig::default().with_log_star(true);
    let got = model_dissimilarity(&fgn_a, &fgn_b, 25, &log_cfg);
    let lit = literal_model_dissimilarity(&fgn_a, &fgn_b, 25, &log_cfg);
    assert!(rel_close(got, lit, 1e-12), "log: {got} vs {lit}");

    // mean term enters through the metric
    let shifted = AnalyticCovModel::from_fn(2.0, |tau| if tau == 0 { 1.0 } else { 0.0 });
    let noise = AnalyticCovModel::white_noise(1.0).unwrap();
    let got = model_dissimilarity(&shifted, &noise, 10, &cfg);
    let lit = literal_model_dissimilarity(&shifted, &noise, 10, &cfg);
    assert!(rel_close(got, lit, 1e-12), "mean: {got} vs {lit}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dissimilarity_is_nonnegative_and_symmetric(
        n in 3usize..40,
        seed in any::<u64>(),
        log in any::<bool>(),
    ) {
        let mut rng = seeded_rng(seed);
        let a = random_generated_path(&mut rng, "a", n);
        let b = random_generated_path(&mut rng, "b", n);
        let cfg = DissimConfig::default().with_log_star(log);
        let ab = path_dissimilarity(&a, &b, &cfg).unwrap();
        let ba = path_dissimilarity(&b, &a, &cfg).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn triangle_inequality_on_equal_length_triples(
        n in 3usize..40,
        seed in any::<u64>(),
    ) {
        // The estimator truncates to the shorter operand and rescales its
        // window grid, so the inequality is a same-length statement.
        let mut rng = seeded_rng(seed);
        let a = random_generated_path(&mut rng, "a", n);
        let b = random_generated_path(&mut rng, "b", n);
        let c = random_generated_path(&mut rng, "c", n);
        let cfg = DissimConfig::default();
        let ab = path_dissimilarity(&a, &b, &cfg).unwrap();
        let bc = path_dissimilarity(&b, &c, &cfg).unwrap();
        let ac = path_dissimilarity(&a, &c, &cfg).unwrap();
        prop_assert!(ac <= ab + bc + 1e-9, "ac={} ab={} bc={}", ac, ab, bc);
    }

    #[test]
    fn optimized_matches_literal_on_arbitrary_values(
        (v1, v2) in (3usize..25).prop_flat_map(|n| {
            (pvec(-50.0..50.0f64, n), pvec(-50.0..50.0f64, 3..25))
        }),
    ) {
        let cfg = DissimConfig::default();
        let a = SamplePath::new("a", v1.clone());
        let b = SamplePath::new("b", v2.clone());
        let opt = path_dissimilarity(&a, &b, &cfg).unwrap();
        let lit = literal_path_dissimilarity(&v1, &v2, &cfg);
        prop_assert!(rel_close(opt, lit, 1e-10), "{} vs {}", opt, lit);
    }
}
