//! Efron bootstrap intervals and difference tests for risk metrics.
//!
//! Every replicate draws its indices from a ChaCha8 stream seeded by a
//! splitmix64 mix of `(master_seed, replicate)`, so results do not depend on
//! the order in which replicates are evaluated. The per-replicate and
//! summary functions are exposed separately so callers can evaluate
//! replicates in parallel and summarize them afterwards.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::risk::MetricSpec;
use crate::{Error, Result};

pub const DEFAULT_REPLICATES: usize = 100;
pub const DEFAULT_LEVEL: f64 = 0.99;
/// Largest tolerated share of replicates on which the metric fails.
pub const MAX_FAILURE_SHARE: f64 = 0.10;

const PAIRED_STREAM: u64 = 0;
const SECOND_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapSpec {
    pub replicates: usize,
    pub level: f64,
    pub seed: u64,
    /// Reuse the same resample indices for both portfolios of a comparison.
    pub paired: bool,
}

impl Default for BootstrapSpec {
    fn default() -> Self {
        Self {
            replicates: DEFAULT_REPLICATES,
            level: DEFAULT_LEVEL,
            seed: 0,
            paired: true,
        }
    }
}

impl BootstrapSpec {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(Error::InvalidArgument(
                "bootstrap needs at least 2 replicates",
            ));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidArgument("bootstrap level must lie in (0, 1)"));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one replicate: `splitmix64(master ^ splitmix64(replicate))`.
pub fn replicate_seed(master_seed: u64, replicate: usize) -> u64 {
    splitmix64(master_seed ^ splitmix64(replicate as u64))
}

fn indices_on_stream(n: usize, replicate: usize, master_seed: u64, stream: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed(master_seed, replicate));
    rng.set_stream(stream);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// `n` indices drawn uniformly with replacement from `0..n`.
pub fn resample_indices(n: usize, replicate: usize, master_seed: u64) -> Vec<usize> {
    indices_on_stream(n, replicate, master_seed, PAIRED_STREAM)
}

fn gather(x: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| x[i]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Metric on one resample; `None` marks a failed replicate.
pub fn replicate_metric(
    returns: &[f64],
    metric: &MetricSpec,
    spec: &BootstrapSpec,
    replicate: usize,
) -> Option<f64> {
    let idx = resample_indices(returns.len(), replicate, spec.seed);
    metric
        .evaluate(&gather(returns, &idx))
        .ok()
        .map(|v| v.value)
}

/// `metric(a*) - metric(b*)` on one replicate.
pub fn replicate_difference(
    a: &[f64],
    b: &[f64],
    metric: &MetricSpec,
    spec: &BootstrapSpec,
    replicate: usize,
) -> Option<f64> {
    let ia = resample_indices(a.len(), replicate, spec.seed);
    let ib = if spec.paired {
        ia.clone()
    } else {
        indices_on_stream(b.len(), replicate, spec.seed, SECOND_STREAM)
    };
    let va = metric.evaluate(&gather(a, &ia)).ok()?.value;
    let vb = metric.evaluate(&gather(b, &ib)).ok()?.value;
    Some(va - vb)
}

fn successes(values: &[Option<f64>]) -> Result<(Vec<f64>, usize)> {
    let total = values.len();
    let mut ok: Vec<f64> = values.iter().flatten().copied().collect();
    let failed = total - ok.len();
    if ok.is_empty() || failed as f64 > MAX_FAILURE_SHARE * total as f64 {
        return Err(Error::BootstrapFailures { failed, total });
    }
    ok.sort_by(f64::total_cmp);
    Ok((ok, failed))
}

/// Percentile interval of sorted values: order statistics
/// `floor(B(1-L)/2)` and `ceil(B(1+L)/2) - 1` (zero-based).
pub fn percentile_interval(sorted: &[f64], level: f64) -> Interval {
    let b = sorted.len() as f64;
    let last = sorted.len() - 1;
    let lo = libm::floor((1.0 - level) / 2.0 * b + 1e-9) as usize;
    let hi = (libm::ceil((1.0 + level) / 2.0 * b - 1e-9) as usize).saturating_sub(1);
    Interval {
        lo: sorted[lo.min(last)],
        hi: sorted[hi.min(last)],
    }
}

/// Interval from replicate values produced by [`replicate_metric`].
pub fn summarize_interval(values: &[Option<f64>], level: f64) -> Result<Interval> {
    let (sorted, _) = successes(values)?;
    Ok(percentile_interval(&sorted, level))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub point_diff: f64,
    pub t_stat: f64,
    pub std_err: f64,
    pub ci: Interval,
    /// Zero lies outside `ci`.
    pub significant: bool,
    pub failed: usize,
}

/// Test summary from replicate differences produced by [`replicate_difference`].
pub fn summarize_difference(
    point_diff: f64,
    values: &[Option<f64>],
    level: f64,
) -> Result<TestResult> {
    let (sorted, failed) = successes(values)?;
    let ci = percentile_interval(&sorted, level);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let std_err = if sorted.len() > 1 {
        libm::sqrt(sorted.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0))
    } else {
        0.0
    };
    let t_stat = if point_diff == 0.0 {
        0.0
    } else if std_err > 0.0 {
        point_diff / std_err
    } else {
        f64::INFINITY.copysign(point_diff)
    };
    Ok(TestResult {
        point_diff,
        t_stat,
        std_err,
        ci,
        significant: ci.lo > 0.0 || ci.hi < 0.0,
        failed,
    })
}

/// Percentile interval of `metric` over `spec.replicates` resamples.
pub fn metric_ci(returns: &[f64], metric: &MetricSpec, spec: &BootstrapSpec) -> Result<Interval> {
    spec.validate()?;
    metric.validate()?;
    if returns.is_empty() {
        return Err(Error::EmptyInput);
    }
    let values: Vec<Option<f64>> = (0..spec.replicates)
        .map(|r| replicate_metric(returns, metric, spec, r))
        .collect();
    summarize_interval(&values, spec.level)
}

/// Bootstrap test of `metric(a) - metric(b)`.
pub fn difference_test(
    a: &[f64],
    b: &[f64],
    metric: &MetricSpec,
    spec: &BootstrapSpec,
) -> Result<TestResult> {
    spec.validate()?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    if spec.paired && a.len() != b.len() {
        return Err(Error::Misaligned {
            expected: a.len(),
            found: b.len(),
        });
    }
    let point_diff = metric.evaluate(a)?.value - metric.evaluate(b)?.value;
    let values: Vec<Option<f64>> = (0..spec.replicates)
        .map(|r| replicate_difference(a, b, metric, spec, r))
        .collect();
    summarize_difference(point_diff, &values, spec.level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risk::MetricKind;
    use alloc::vec;

    #[test]
    fn single_observation_resamples_to_zero() {
        assert!(resample_indices(1, 7, 42).iter().all(|&i| i == 0));
    }

    #[test]
    fn indices_are_deterministic_per_replicate() {
        assert_eq!(resample_indices(50, 3, 9), resample_indices(50, 3, 9));
        assert_ne!(resample_indices(50, 3, 9), resample_indices(50, 4, 9));
        assert_ne!(resample_indices(50, 3, 9), resample_indices(50, 3, 10));
    }

    #[test]
    fn constant_series_has_zero_width_interval() {
        let spec = BootstrapSpec {
            seed: 1,
            ..Default::default()
        };
        let ci = metric_ci(&[0.01; 40], &MetricSpec::new(MetricKind::Variance), &spec).unwrap();
        assert_eq!(ci, Interval { lo: 0.0, hi: 0.0 });
    }

    #[test]
    fn two_replicates_span_min_and_max() {
        let x: Vec<f64> = (0..30).map(|i| libm::sin(i as f64)).collect();
        let m = MetricSpec::new(MetricKind::Variance);
        let spec = BootstrapSpec {
            replicates: 2,
            seed: 5,
            ..Default::default()
        };
        let v0 = replicate_metric(&x, &m, &spec, 0).unwrap();
        let v1 = replicate_metric(&x, &m, &spec, 1).unwrap();
        let ci = metric_ci(&x, &m, &spec).unwrap();
        assert_eq!(ci.lo, v0.min(v1));
        assert_eq!(ci.hi, v0.max(v1));
    }

    #[test]
    fn identical_portfolios_never_differ() {
        let x: Vec<f64> = (0..60).map(|i| libm::cos(i as f64 * 0.7) * 0.01).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let spec = BootstrapSpec {
            seed: 11,
            ..Default::default()
        };
        let m = MetricSpec::new(MetricKind::Variance);
        for b in [&x, &neg] {
            let t = difference_test(&x, b, &m, &spec).unwrap();
            assert_eq!(t.point_diff, 0.0);
            assert_eq!(t.ci, Interval { lo: 0.0, hi: 0.0 });
            assert_eq!(t.t_stat, 0.0);
            assert!(!t.significant);
        }
    }

    #[test]
    fn too_many_failures_abort() {
        let mut values = vec![Some(1.0); 18];
        values.extend([None, None]);
        assert!(summarize_interval(&values, 0.9).is_ok());
        values.push(None);
        assert!(matches!(
            summarize_interval(&values, 0.9),
            Err(Error::BootstrapFailures {
                failed: 3,
                total: 21
            })
        ));
    }

    #[test]
    fn interval_order_statistics() {
        let sorted: Vec<f64> = (0..400).map(|i| i as f64).collect();
        assert_eq!(
            percentile_interval(&sorted, 0.95),
            Interval {
                lo: 10.0,
                hi: 389.0
            }
        );
        let hundred: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(
            percentile_interval(&hundred, 0.99),
            Interval { lo: 0.0, hi: 99.0 }
        );
        assert_eq!(
            percentile_interval(&hundred, 0.90),
            Interval { lo: 5.0, hi: 94.0 }
        );
    }

    #[test]
    fn bootstrap_spec_validation() {
        assert!(BootstrapSpec {
            replicates: 1,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(BootstrapSpec {
            level: 1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
