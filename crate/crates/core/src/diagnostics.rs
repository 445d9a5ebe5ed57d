//! Descriptive statistics and the normality / ARCH / unit-root battery.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::least_squares;
use crate::special::chi_square_sf;
use crate::{Error, Result};

pub const DEFAULT_LM_LAGS: usize = 5;
pub const DEFAULT_ADF_LAGS: usize = 0;
/// Minimum length for [`summary_stats`].
pub const MIN_SUMMARY_LEN: usize = 20;

/// Asymptotic Dickey-Fuller critical values, constant and no trend.
pub const ADF_CRITICAL_1PCT: f64 = -3.43;
pub const ADF_CRITICAL_5PCT: f64 = -2.86;

/// A statistic with a chi-square reference distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

impl ChiSquareTest {
    fn new(statistic: f64, df: usize) -> Self {
        ChiSquareTest {
            statistic,
            df,
            p_value: chi_square_sf(statistic, df),
        }
    }

    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Dickey-Fuller t statistic on the lagged level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdfTest {
    pub statistic: f64,
    pub lags: usize,
    pub nobs: usize,
}

impl AdfTest {
    pub fn reject_1pct(&self) -> bool {
        self.statistic < ADF_CRITICAL_1PCT
    }

    pub fn reject_5pct(&self) -> bool {
        self.statistic < ADF_CRITICAL_5PCT
    }
}

/// Table-style descriptive statistics for one return series.
///
/// Shape statistics and tests are `None` when undefined for the input
/// (constant series, degenerate regressions).
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub std_dev: f64,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    pub bera_jarque: Option<ChiSquareTest>,
    pub lm_arch: Option<ChiSquareTest>,
    pub adf: Option<AdfTest>,
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with the `n - 1` denominator.
pub fn sample_variance(x: &[f64]) -> f64 {
    // Shifting by the first value makes a constant series exactly zero.
    let x0 = x[0];
    let m = x.iter().map(|v| v - x0).sum::<f64>() / x.len() as f64;
    x.iter().map(|v| (v - x0 - m) * (v - x0 - m)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Central moments m2, m3, m4 with the `n` denominator, or `None` when the
/// series has no spread.
fn central_moments(x: &[f64]) -> Option<(f64, f64, f64)> {
    if x.len() < 2 {
        return None;
    }
    let m = mean(x);
    let n = x.len() as f64;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    let scale = x.iter().fold(0.0_f64, |a, v| a.max(libm::fabs(*v)));
    if m2 <= (1e-14 * scale) * (1e-14 * scale) || m2 == 0.0 {
        return None;
    }
    Some((m2, m3, m4))
}

/// Standardized third central moment (no small-sample correction).
pub fn skewness(x: &[f64]) -> Option<f64> {
    central_moments(x).map(|(m2, m3, _)| m3 / libm::pow(m2, 1.5))
}

/// Standardized fourth central moment minus 3.
pub fn excess_kurtosis(x: &[f64]) -> Option<f64> {
    central_moments(x).map(|(m2, _, m4)| m4 / (m2 * m2) - 3.0)
}

/// `n (S^2/6 + K^2/24)` against chi-square(2), `K` the excess kurtosis.
pub fn bera_jarque(x: &[f64]) -> Option<ChiSquareTest> {
    let s = skewness(x)?;
    let k = excess_kurtosis(x)?;
    Some(ChiSquareTest::new(
        x.len() as f64 * (s * s / 6.0 + k * k / 24.0),
        2,
    ))
}

/// Engle's LM test: regress squared demeaned returns on `lags` of themselves;
/// the statistic is `T R^2` over the `T` usable observations.
pub fn lm_arch(x: &[f64], lags: usize) -> Result<ChiSquareTest> {
    if lags == 0 {
        return Err(Error::InvalidArgument("LM test needs at least one lag"));
    }
    if x.len() <= lags + 10 {
        return Err(Error::TooShort {
            what: "LM ARCH test",
            required: lags + 11,
            available: x.len(),
        });
    }
    let m = mean(x);
    let u: Vec<f64> = x.iter().map(|v| (v - m) * (v - m)).collect();
    let t = u.len() - lags;
    let y = u[lags..].to_vec();
    let mut cols = vec![vec![1.0; t]];
    for l in 1..=lags {
        cols.push(u[lags - l..u.len() - l].to_vec());
    }
    let fit = least_squares(&cols, &y)?;
    if fit.tss <= 1e-24 * fit.yy || fit.tss == 0.0 {
        return Err(Error::Degenerate("constant squared residuals"));
    }
    Ok(ChiSquareTest::new(t as f64 * fit.r_squared(), lags))
}

/// Augmented Dickey-Fuller regression with a constant:
/// `dy_t = a + g y_{t-1} + sum_i p_i dy_{t-i} + e_t`; returns the t statistic on `g`.
pub fn adf_test(y: &[f64], lags: usize) -> Result<AdfTest> {
    if y.len() <= lags + 15 {
        return Err(Error::TooShort {
            what: "Dickey-Fuller test",
            required: lags + 16,
            available: y.len(),
        });
    }
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    // dy[j] = y[j+1] - y[j]; response dy[j] for j >= lags
    let nobs = dy.len() - lags;
    let resp = dy[lags..].to_vec();
    let mut cols = vec![vec![1.0; nobs], y[lags..y.len() - 1].to_vec()];
    for l in 1..=lags {
        cols.push(dy[lags - l..dy.len() - l].to_vec());
    }
    let fit = least_squares(&cols, &resp)?;
    if fit.rss <= 1e-20 * fit.yy {
        return Err(Error::Degenerate("Dickey-Fuller regression fits exactly"));
    }
    Ok(AdfTest {
        statistic: fit.coef[1] / fit.std_err[1],
        lags,
        nobs,
    })
}

pub fn summary_stats(x: &[f64], lm_lags: usize, adf_lags: usize) -> Result<SummaryStats> {
    if x.len() < MIN_SUMMARY_LEN {
        return Err(Error::TooShort {
            what: "summary statistics",
            required: MIN_SUMMARY_LEN,
            available: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("non-finite return"));
    }
    let min = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let defined = central_moments(x).is_some();
    Ok(SummaryStats {
        n: x.len(),
        mean: mean(x).clamp(min, max),
        min,
        max,
        std_dev: if defined {
            libm::sqrt(sample_variance(x))
        } else {
            0.0
        },
        skewness: skewness(x),
        excess_kurtosis: excess_kurtosis(x),
        bera_jarque: bera_jarque(x),
        lm_arch: if defined {
            lm_arch(x, lm_lags).ok()
        } else {
            None
        },
        adf: if defined {
            adf_test(x, adf_lags).ok()
        } else {
            None
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_two_point_sample_has_zero_skew() {
        let x: Vec<f64> = (0..40)
            .map(|i| if i % 2 == 0 { -0.3 } else { 0.3 })
            .collect();
        assert_eq!(skewness(&x), Some(0.0));
        // two-point distribution: kurtosis 1, excess -2
        assert!((excess_kurtosis(&x).unwrap() + 2.0).abs() < 1e-12);
        let bj = bera_jarque(&x).unwrap();
        assert!((bj.statistic - 40.0 * 4.0 / 24.0).abs() < 1e-9);
    }

    #[test]
    fn constant_series_reports_undefined_shape() {
        let x = vec![0.01; 50];
        let s = summary_stats(&x, 5, 0).unwrap();
        assert_eq!(s.skewness, None);
        assert_eq!(s.excess_kurtosis, None);
        assert_eq!(s.bera_jarque, None);
        assert_eq!(s.lm_arch, None);
        assert_eq!(s.adf, None);
        assert_eq!(s.std_dev, 0.0);
        assert!(lm_arch(&x, 5).is_err());
    }

    #[test]
    fn ramp_is_degenerate_for_dickey_fuller() {
        let y: Vec<f64> = (0..100).map(|i| 0.5 + 0.1 * i as f64).collect();
        assert!(matches!(adf_test(&y, 0), Err(Error::Degenerate(_))));
        assert!(matches!(adf_test(&y[..10], 0), Err(Error::TooShort { .. })));
    }

    #[test]
    fn short_series_rejected() {
        assert!(summary_stats(&[0.1; 19], 5, 0).is_err());
        assert!(matches!(
            lm_arch(&[0.1, 0.2, 0.3], 5),
            Err(Error::TooShort { .. })
        ));
    }
}
