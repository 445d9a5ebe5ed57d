//! Rolling-window OLS hedge ratios.

use alloc::vec::Vec;
use core::ops::Range;

use super::{HedgeRatioSeries, ModelId};
use crate::market_data::{PairView, ReturnPair};
use crate::{Error, Result};

/// Fewest observations a single OLS window may use.
pub const MIN_OLS_WINDOW: usize = 10;
/// Length at which the in-sample expanding window starts.
pub const OLS_WARMUP: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlsFit {
    pub alpha: f64,
    pub beta: f64,
    pub window: (usize, usize),
}

/// How in-sample OLS ratios are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OlsScheme {
    /// Expanding from [`OLS_WARMUP`] observations up to the window length,
    /// then rolling; each window ends at `t - 1`.
    #[default]
    Rolling,
    /// One slope fitted on the whole in-sample period.
    FullSample,
}

impl OlsScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            OlsScheme::Rolling => "rolling",
            OlsScheme::FullSample => "full-sample",
        }
    }
}

impl core::str::FromStr for OlsScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rolling" => Ok(OlsScheme::Rolling),
            "full-sample" | "full" => Ok(OlsScheme::FullSample),
            _ => Err(Error::InvalidArgument(
                "OLS scheme must be rolling or full-sample",
            )),
        }
    }
}

/// Slope and intercept of spot on futures over `window` (single pass).
pub fn ols_window_fit(pair: PairView<'_>, window: Range<usize>) -> Result<OlsFit> {
    if window.end > pair.len() || window.start > window.end {
        return Err(Error::InvalidArgument("OLS window outside the series"));
    }
    let len = window.len();
    if len < MIN_OLS_WINDOW {
        return Err(Error::TooShort {
            what: "OLS window",
            required: MIN_OLS_WINDOW,
            available: len,
        });
    }
    let (mut ms, mut mf, mut cov, mut var) = (0.0, 0.0, 0.0, 0.0);
    for (k, t) in window.clone().enumerate() {
        let n = (k + 1) as f64;
        let ds = pair.spot[t] - ms;
        let df = pair.futures[t] - mf;
        ms += ds / n;
        mf += df / n;
        cov += df * (pair.spot[t] - ms);
        var += df * (pair.futures[t] - mf);
    }
    let scale = pair.futures[window.clone()]
        .iter()
        .fold(0.0_f64, |a, v| a.max(libm::fabs(*v)));
    if var <= 1e-24 * scale * scale * len as f64 || var <= 0.0 {
        return Err(Error::Degenerate("zero futures variance in OLS window"));
    }
    let beta = cov / var;
    Ok(OlsFit {
        alpha: ms - beta * mf,
        beta,
        window: (window.start, window.end),
    })
}

/// OLS hedge ratios for the in-sample or out-of-sample dates of `pair`.
///
/// Out of sample, the window for date `t` is always the `window_len`
/// observations ending at `t - 1`. In sample, see [`OlsScheme`]; dates before
/// the warm-up share the warm-up fit.
pub fn ols_hedge(
    pair: &ReturnPair,
    window_len: usize,
    out_of_sample: bool,
    scheme: OlsScheme,
) -> Result<HedgeRatioSeries> {
    if window_len < MIN_OLS_WINDOW {
        return Err(Error::TooShort {
            what: "OLS window",
            required: MIN_OLS_WINDOW,
            available: window_len,
        });
    }
    if window_len > pair.n_in {
        return Err(Error::TooShort {
            what: "in-sample data for the OLS window",
            required: window_len,
            available: pair.n_in,
        });
    }
    let view = pair.view();
    let dates = if out_of_sample {
        pair.out_of_sample().dates
    } else {
        pair.in_sample().dates
    };
    let beta: Vec<f64> = match (out_of_sample, scheme) {
        (false, OlsScheme::FullSample) => {
            let b = ols_window_fit(view, 0..pair.n_in)?.beta;
            alloc::vec![b; pair.n_in]
        }
        (true, OlsScheme::FullSample) => {
            let b = ols_window_fit(view, 0..pair.n_in)?.beta;
            alloc::vec![b; pair.n_out]
        }
        (false, OlsScheme::Rolling) => {
            let warmup = OLS_WARMUP.min(window_len);
            let first = ols_window_fit(view, 0..warmup)?.beta;
            (0..pair.n_in)
                .map(|t| {
                    if t <= warmup {
                        Ok(first)
                    } else {
                        ols_window_fit(view, t.saturating_sub(window_len)..t).map(|f| f.beta)
                    }
                })
                .collect::<Result<_>>()?
        }
        (true, OlsScheme::Rolling) => (pair.n_in..pair.n_in + pair.n_out)
            .map(|t| ols_window_fit(view, t - window_len..t).map(|f| f.beta))
            .collect::<Result<_>>()?,
    };
    Ok(HedgeRatioSeries {
        model: ModelId::Ols,
        dates: dates.to_vec(),
        beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use chrono::NaiveDate;

    fn make(spot: Vec<f64>, fut: Vec<f64>) -> ReturnPair {
        let d0 = NaiveDate::from_ymd_opt(2000, 1, 3).unwrap();
        let dates = (0..spot.len())
            .map(|i| d0 + chrono::Duration::days(i as i64))
            .collect();
        ReturnPair::new(dates, spot, fut).unwrap()
    }

    fn wiggle(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| 0.01 * libm::sin(1.3 * i as f64) + 0.002 * libm::cos(0.7 * i as f64))
            .collect()
    }

    #[test]
    fn identical_series_give_unit_slope() {
        let f = wiggle(40);
        let p = make(f.clone(), f);
        let fit = ols_window_fit(p.view(), 0..40).unwrap();
        assert!((fit.beta - 1.0).abs() < 1e-12);
        assert!(fit.alpha.abs() < 1e-15);
    }

    #[test]
    fn exact_linear_relation() {
        let f = wiggle(40);
        let s = f.iter().map(|v| 0.5 * v + 0.002).collect();
        let p = make(s, f);
        let fit = ols_window_fit(p.view(), 5..35).unwrap();
        assert!((fit.beta - 0.5).abs() < 1e-12);
        assert!((fit.alpha - 0.002).abs() < 1e-14);
        assert_eq!(fit.window, (5, 35));
    }

    #[test]
    fn flat_futures_is_degenerate() {
        let p = make(wiggle(20), vec![0.003; 20]);
        assert!(matches!(
            ols_window_fit(p.view(), 0..20),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn constant_relation_gives_constant_ratios() {
        let f = wiggle(260);
        let s = f.iter().map(|v| 0.7 * v).collect();
        let p = make(s, f).with_split(160, 100).unwrap();
        for oos in [false, true] {
            for scheme in [OlsScheme::Rolling, OlsScheme::FullSample] {
                let h = ols_hedge(&p, 60, oos, scheme).unwrap();
                assert_eq!(h.len(), if oos { 100 } else { 160 });
                assert!(h.beta.iter().all(|b| (b - 0.7).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn window_longer_than_in_sample_is_rejected() {
        let f = wiggle(100);
        let p = make(f.clone(), f).with_split(50, 50).unwrap();
        assert!(matches!(
            ols_hedge(&p, 60, true, OlsScheme::Rolling),
            Err(Error::TooShort { .. })
        ));
    }
}
