//! Size, power and coverage checks on simulated data.

use hedgekit_core::bootstrap::{difference_test, metric_ci, resample_indices, BootstrapSpec};
use hedgekit_core::diagnostics::{adf_test, bera_jarque, excess_kurtosis, lm_arch, skewness};
use hedgekit_core::risk::{MetricKind, MetricSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn normals(seed: u64, n: usize, sd: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect()
}

fn arch1(seed: u64, n: usize, alpha: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prev: f64 = 0.0;
    let mut out = Vec::with_capacity(n);
    for t in 0..n + 100 {
        let z: f64 = rng.sample(StandardNormal);
        prev = (0.2 + alpha * prev * prev).sqrt() * z;
        if t >= 100 {
            out.push(prev);
        }
    }
    out
}

fn random_walk(seed: u64, n: usize) -> Vec<f64> {
    normals(seed, n, 1.0)
        .into_iter()
        .scan(100.0, |level, e| {
            *level += e;
            Some(*level)
        })
        .collect()
}

#[test]
fn normal_samples_pass_normality() {
    let mut bj_ok = 0;
    let mut shape_ok = 0;
    for seed in 0..100 {
        let x = normals(seed, 10_000, 1.0);
        if bera_jarque(&x).unwrap().statistic < 9.21 {
            bj_ok += 1;
        }
        if skewness(&x).unwrap().abs() < 0.08 && excess_kurtosis(&x).unwrap().abs() < 0.15 {
            shape_ok += 1;
        }
    }
    assert!(bj_ok >= 95, "{bj_ok}/100");
    assert!(shape_ok >= 95, "{shape_ok}/100");
}

#[test]
fn lm_arch_size_and_power() {
    let false_alarms = (0..200)
        .filter(|s| lm_arch(&normals(1000 + s, 1000, 1.0), 5).unwrap().significant(0.05))
        .count();
    assert!(false_alarms <= 14, "{false_alarms}/200 rejections under the null");
    let hits = (0..100)
        .filter(|s| lm_arch(&arch1(*s, 1000, 0.8), 5).unwrap().significant(0.05))
        .count();
    assert!(hits >= 95, "{hits}/100");
}

#[test]
fn dickey_fuller_separates_levels_from_returns() {
    let walks_kept = (0..200)
        .filter(|s| !adf_test(&random_walk(*s, 500), 0).unwrap().reject_5pct())
        .count();
    assert!(walks_kept >= 180, "{walks_kept}/200");
    let iid_rejected = (0..200)
        .filter(|s| adf_test(&normals(500 + s, 500, 0.01), 0).unwrap().reject_5pct())
        .count();
    assert!(iid_rejected >= 198, "{iid_rejected}/200");
}

#[test]
fn resampled_indices_are_uniform() {
    let n = 10;
    let mut counts = [0usize; 10];
    let mut total = 0;
    for rep in 0..1000 {
        for i in resample_indices(n, rep, 99) {
            counts[i] += 1;
            total += 1;
        }
    }
    assert_eq!(total, 10_000);
    let p = 0.1;
    let sigma = (total as f64 * p * (1.0 - p)).sqrt();
    for c in counts {
        assert!((c as f64 - total as f64 * p).abs() < 3.0 * sigma, "{counts:?}");
    }
}

#[test]
fn percentile_interval_covers_true_variance() {
    let spec = |seed| BootstrapSpec {
        replicates: 400,
        level: 0.95,
        seed,
        paired: true,
    };
    let metric = MetricSpec::new(MetricKind::Variance);
    let covered = (0..200)
        .filter(|m| {
            let x = normals(7000 + m, 200, 1.0);
            metric_ci(&x, &metric, &spec(*m)).unwrap().contains(1.0)
        })
        .count();
    assert!((180..=196).contains(&covered), "{covered}/200");
}

#[test]
fn variance_difference_is_detected() {
    let metric = MetricSpec::new(MetricKind::Variance);
    let found = (0..100)
        .filter(|s| {
            let a = normals(2 * s, 500, 1.0);
            let b = normals(2 * s + 1, 500, 2.0);
            let spec = BootstrapSpec {
                seed: *s,
                ..Default::default()
            };
            let r = difference_test(&a, &b, &metric, &spec).unwrap();
            r.significant && r.t_stat < 0.0
        })
        .count();
    assert!(found >= 95, "{found}/100");
}
