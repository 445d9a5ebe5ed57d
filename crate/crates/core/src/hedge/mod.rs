//! Optimal hedge ratio models.

use alloc::vec;
use alloc::vec::Vec;

use chrono::NaiveDate;

use crate::market_data::ReturnPair;
use crate::{Error, Result};

mod fit;
mod ols;
mod simulate;
mod vech;

pub use fit::{fit_vech, vech_hedge, FitOptions, VechFit, VechHedge, MIN_FIT_LEN};
pub use ols::{ols_hedge, ols_window_fit, OlsFit, OlsScheme, MIN_OLS_WINDOW, OLS_WARMUP};
pub use simulate::{simulate_vech, simulate_vech_with, GaussianShocks, Shocks, SkewedSpotShocks};
pub use vech::{
    filter_moments, filter_series, neg_log_likelihood, next_moments,
    CondMoments, IndicatorRule, MomentPath, SpotFutures, VechParams, VechSpec, VechTerm,
    CLAMP_PENALTY, MAX_CORRELATION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelId {
    None,
    Naive,
    Ols,
    Sdvech,
    Asdvech,
}

impl ModelId {
    pub const ALL: [ModelId; 5] = [
        ModelId::None,
        ModelId::Naive,
        ModelId::Ols,
        ModelId::Sdvech,
        ModelId::Asdvech,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::None => "none",
            ModelId::Naive => "naive",
            ModelId::Ols => "ols",
            ModelId::Sdvech => "sdvech",
            ModelId::Asdvech => "asdvech",
        }
    }
}

impl core::fmt::Display for ModelId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelId::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or(Error::InvalidArgument("unknown model id"))
    }
}

/// Per-date hedge ratios (futures units per unit of spot) for one model.
#[derive(Debug, Clone, PartialEq)]
pub struct HedgeRatioSeries {
    pub model: ModelId,
    pub dates: Vec<NaiveDate>,
    pub beta: Vec<f64>,
}

impl HedgeRatioSeries {
    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }
}

/// No hedge (`beta = 0`) or the 1:1 naive hedge (`beta = 1`).
pub fn constant_ratio(model: ModelId, dates: &[NaiveDate]) -> Result<HedgeRatioSeries> {
    let value = match model {
        ModelId::None => 0.0,
        ModelId::Naive => 1.0,
        _ => {
            return Err(Error::InvalidArgument(
                "constant ratio is only defined for none/naive",
            ))
        }
    };
    Ok(HedgeRatioSeries {
        model,
        dates: dates.to_vec(),
        beta: vec![value; dates.len()],
    })
}

/// `beta_t = H_sf,t / H_f,t` along a filtered moment path.
pub fn garch_hedge_ratios(
    model: ModelId,
    dates: &[NaiveDate],
    path: &MomentPath,
) -> Result<HedgeRatioSeries> {
    if dates.len() != path.len() {
        return Err(Error::Misaligned {
            expected: path.len(),
            found: dates.len(),
        });
    }
    Ok(HedgeRatioSeries {
        model,
        dates: dates.to_vec(),
        beta: path
            .cov
            .iter()
            .zip(&path.var_futures)
            .map(|(c, v)| c / v)
            .collect(),
    })
}

/// In- and out-of-sample hedge ratios for one model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelHedges {
    pub model: ModelId,
    pub in_sample: HedgeRatioSeries,
    pub out_of_sample: HedgeRatioSeries,
}

impl ModelHedges {
    pub fn get(&self, sample: crate::effectiveness::Sample) -> &HedgeRatioSeries {
        match sample {
            crate::effectiveness::Sample::In => &self.in_sample,
            crate::effectiveness::Sample::Out => &self.out_of_sample,
        }
    }
}

/// Estimation settings shared by all models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HedgeConfig {
    pub ols_window: usize,
    pub ols_scheme: OlsScheme,
    pub fit: FitOptions,
    pub indicator: IndicatorRule,
    /// Re-fit the GARCH models every `k` out-of-sample dates.
    pub refit_every: Option<usize>,
}

impl Default for HedgeConfig {
    fn default() -> Self {
        HedgeConfig {
            ols_window: 60,
            ols_scheme: OlsScheme::Rolling,
            fit: FitOptions::default(),
            indicator: IndicatorRule::Own,
            refit_every: None,
        }
    }
}

/// Hedge ratios of one model plus any GARCH fits behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedModel {
    pub hedges: ModelHedges,
    pub fits: Vec<VechFit>,
}

pub fn estimate_model(
    pair: &ReturnPair,
    model: ModelId,
    config: &HedgeConfig,
) -> Result<EstimatedModel> {
    let (hedges, fits) = match model {
        ModelId::None | ModelId::Naive => (
            ModelHedges {
                model,
                in_sample: constant_ratio(model, pair.in_sample().dates)?,
                out_of_sample: constant_ratio(model, pair.out_of_sample().dates)?,
            },
            Vec::new(),
        ),
        ModelId::Ols => (
            ModelHedges {
                model,
                in_sample: ols_hedge(pair, config.ols_window, false, config.ols_scheme)?,
                out_of_sample: ols_hedge(pair, config.ols_window, true, config.ols_scheme)?,
            },
            Vec::new(),
        ),
        ModelId::Sdvech | ModelId::Asdvech => {
            let spec = if model == ModelId::Asdvech {
                VechSpec::asymmetric().with_indicator(config.indicator)
            } else {
                VechSpec::symmetric()
            };
            let h = vech_hedge(pair, spec, config.fit, config.refit_every)?;
            (
                ModelHedges {
                    model,
                    in_sample: h.in_sample,
                    out_of_sample: h.out_of_sample,
                },
                h.fits,
            )
        }
    };
    Ok(EstimatedModel { hedges, fits })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dates(n: usize) -> Vec<NaiveDate> {
        let d0 = NaiveDate::from_ymd_opt(2001, 3, 1).unwrap();
        (0..n)
            .map(|i| d0 + chrono::Duration::days(i as i64))
            .collect()
    }

    #[test]
    fn constant_ratios() {
        assert_eq!(
            constant_ratio(ModelId::None, &dates(5)).unwrap().beta,
            vec![0.0; 5]
        );
        assert_eq!(
            constant_ratio(ModelId::Naive, &dates(5)).unwrap().beta,
            vec![1.0; 5]
        );
        assert!(constant_ratio(ModelId::Naive, &[]).unwrap().is_empty());
        assert!(constant_ratio(ModelId::Ols, &dates(2)).is_err());
    }

    fn path(cov: Vec<f64>, var_f: Vec<f64>) -> MomentPath {
        let n = cov.len();
        MomentPath {
            var_spot: vec![1.0; n],
            var_futures: var_f,
            cov,
            resid_spot: vec![0.0; n],
            resid_futures: vec![0.0; n],
            clamped: 0,
        }
    }

    #[test]
    fn garch_ratio_is_covariance_over_variance() {
        let d = dates(3);
        let p = path(vec![0.2, 0.5, 0.0004], vec![0.2, 0.5, 0.0005]);
        let b = garch_hedge_ratios(ModelId::Sdvech, &d, &p).unwrap().beta;
        assert_eq!(&b[..2], &[1.0, 1.0]);
        assert!((b[2] - 0.8).abs() < 1e-15);
        let p = path(vec![0.0; 3], vec![0.3; 3]);
        assert_eq!(
            garch_hedge_ratios(ModelId::Sdvech, &d, &p).unwrap().beta,
            vec![0.0; 3]
        );
    }

    #[test]
    fn model_ids_parse() {
        for m in ModelId::ALL {
            assert_eq!(m.as_str().parse::<ModelId>().unwrap(), m);
        }
        assert_eq!("ASDVECH".parse::<ModelId>().unwrap(), ModelId::Asdvech);
        assert!("garch".parse::<ModelId>().is_err());
    }
}
