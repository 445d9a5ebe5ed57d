//! Bivariate diagonal VECH GARCH(1,1), with optional GJR-style asymmetry in
//! the two variance equations.

use alloc::vec::Vec;

use crate::market_data::ReturnPair;
use crate::{Error, Result};

/// Conditional correlations are clamped to `+-MAX_CORRELATION`.
pub const MAX_CORRELATION: f64 = 0.9999;
/// Added to the negative log-likelihood once per clamped step.
pub const CLAMP_PENALTY: f64 = 1.0e3;

const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// One coefficient per conditional moment equation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VechTerm {
    pub spot: f64,
    pub futures: f64,
    pub cross: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpotFutures {
    pub spot: f64,
    pub futures: f64,
}

/// Parameters of the mean and (co)variance equations.
///
/// `H_s,t = c_s + a_s e_s,t-1^2 + b_s H_s,t-1 + d_s e_s,t-1^2 I_s,t-1`, the
/// futures variance alike, and
/// `H_sf,t = c_sf + a_sf e_s,t-1 e_f,t-1 + b_sf H_sf,t-1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VechParams {
    pub mean: SpotFutures,
    pub intercept: VechTerm,
    pub arch: VechTerm,
    pub garch: VechTerm,
    /// Extra ARCH loading after a negative shock; ignored by symmetric specs.
    pub asymmetry: SpotFutures,
}

/// When the asymmetry term switches on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndicatorRule {
    /// Each variance reacts to its own negative residual.
    #[default]
    Own,
    /// Both variances react only when both residuals are negative.
    Joint,
}

impl IndicatorRule {
    pub fn as_str(self) -> &'static str {
        match self {
            IndicatorRule::Own => "own",
            IndicatorRule::Joint => "joint",
        }
    }
}

impl core::str::FromStr for IndicatorRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "own" => Ok(IndicatorRule::Own),
            "joint" => Ok(IndicatorRule::Joint),
            _ => Err(Error::InvalidArgument("indicator must be own or joint")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VechSpec {
    pub asymmetric: bool,
    pub indicator: IndicatorRule,
}

impl VechSpec {
    pub const fn symmetric() -> Self {
        VechSpec {
            asymmetric: false,
            indicator: IndicatorRule::Own,
        }
    }

    pub const fn asymmetric() -> Self {
        VechSpec {
            asymmetric: true,
            indicator: IndicatorRule::Own,
        }
    }

    pub const fn with_indicator(self, indicator: IndicatorRule) -> Self {
        VechSpec { indicator, ..self }
    }
}

/// Conditional covariance matrix of (spot, futures) at one date.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondMoments {
    pub var_spot: f64,
    pub var_futures: f64,
    pub cov: f64,
}

impl CondMoments {
    pub fn determinant(&self) -> f64 {
        self.var_spot * self.var_futures - self.cov * self.cov
    }

    /// Clamps the implied correlation into `+-MAX_CORRELATION`; reports
    /// whether it had to.
    pub fn clamp_correlation(&mut self) -> bool {
        let limit = MAX_CORRELATION * libm::sqrt(self.var_spot * self.var_futures);
        if libm::fabs(self.cov) > limit {
            self.cov = if self.cov > 0.0 { limit } else { -limit };
            true
        } else {
            false
        }
    }

    /// Centered sample covariance (`n - 1` denominator).
    pub fn sample(spot: &[f64], futures: &[f64]) -> Self {
        let n = spot.len() as f64;
        let ms = spot.iter().sum::<f64>() / n;
        let mf = futures.iter().sum::<f64>() / n;
        let (mut vs, mut vf, mut c) = (0.0, 0.0, 0.0);
        for (s, f) in spot.iter().zip(futures) {
            vs += (s - ms) * (s - ms);
            vf += (f - mf) * (f - mf);
            c += (s - ms) * (f - mf);
        }
        CondMoments {
            var_spot: vs / (n - 1.0),
            var_futures: vf / (n - 1.0),
            cov: c / (n - 1.0),
        }
    }
}

impl VechParams {
    /// `a + b + d/2` for the spot and futures variance equations.
    pub fn persistence(&self, spec: VechSpec) -> SpotFutures {
        let d = if spec.asymmetric {
            self.asymmetry
        } else {
            SpotFutures::default()
        };
        SpotFutures {
            spot: self.arch.spot + self.garch.spot + d.spot / 2.0,
            futures: self.arch.futures + self.garch.futures + d.futures / 2.0,
        }
    }

    pub fn validate(&self, spec: VechSpec) -> Result<()> {
        let all = [
            self.mean.spot,
            self.mean.futures,
            self.intercept.spot,
            self.intercept.futures,
            self.intercept.cross,
            self.arch.spot,
            self.arch.futures,
            self.arch.cross,
            self.garch.spot,
            self.garch.futures,
            self.garch.cross,
            self.asymmetry.spot,
            self.asymmetry.futures,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter"));
        }
        if !(self.intercept.spot > 0.0 && self.intercept.futures > 0.0) {
            return Err(Error::InvalidParams("variance intercepts must be positive"));
        }
        let mut nonneg = alloc::vec![
            self.arch.spot,
            self.arch.futures,
            self.garch.spot,
            self.garch.futures
        ];
        if spec.asymmetric {
            nonneg.extend([self.asymmetry.spot, self.asymmetry.futures]);
        }
        if nonneg.iter().any(|v| *v < 0.0) {
            return Err(Error::InvalidParams(
                "ARCH, GARCH and asymmetry terms must be non-negative",
            ));
        }
        let p = self.persistence(spec);
        if !(p.spot < 1.0 && p.futures < 1.0) {
            return Err(Error::InvalidParams(
                "variance recursion is not covariance-stationary",
            ));
        }
        Ok(())
    }

    /// Long-run covariance matrix, when the covariance recursion is stable.
    pub fn unconditional(&self, spec: VechSpec) -> Option<CondMoments> {
        let p = self.persistence(spec);
        let pc = self.arch.cross + self.garch.cross;
        if p.spot >= 1.0 || p.futures >= 1.0 || libm::fabs(pc) >= 1.0 {
            return None;
        }
        Some(CondMoments {
            var_spot: self.intercept.spot / (1.0 - p.spot),
            var_futures: self.intercept.futures / (1.0 - p.futures),
            cov: self.intercept.cross / (1.0 - pc),
        })
    }
}

/// One step of the recursion from last period's moments and residuals,
/// before any correlation clamping.
pub fn next_moments(
    params: &VechParams,
    spec: VechSpec,
    prev: CondMoments,
    resid_spot: f64,
    resid_futures: f64,
) -> CondMoments {
    let es2 = resid_spot * resid_spot;
    let ef2 = resid_futures * resid_futures;
    let mut var_spot =
        params.intercept.spot + params.arch.spot * es2 + params.garch.spot * prev.var_spot;
    let mut var_futures = params.intercept.futures
        + params.arch.futures * ef2
        + params.garch.futures * prev.var_futures;
    if spec.asymmetric {
        let (on_s, on_f) = match spec.indicator {
            IndicatorRule::Own => (resid_spot < 0.0, resid_futures < 0.0),
            IndicatorRule::Joint => {
                let both = resid_spot < 0.0 && resid_futures < 0.0;
                (both, both)
            }
        };
        if on_s {
            var_spot += params.asymmetry.spot * es2;
        }
        if on_f {
            var_futures += params.asymmetry.futures * ef2;
        }
    }
    CondMoments {
        var_spot,
        var_futures,
        cov: params.intercept.cross
            + params.arch.cross * resid_spot * resid_futures
            + params.garch.cross * prev.cov,
    }
}

/// Filtered conditional moments and residuals, one entry per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentPath {
    pub var_spot: Vec<f64>,
    pub var_futures: Vec<f64>,
    pub cov: Vec<f64>,
    pub resid_spot: Vec<f64>,
    pub resid_futures: Vec<f64>,
    /// Number of steps whose covariance was clamped.
    pub clamped: usize,
}

impl MomentPath {
    pub fn len(&self) -> usize {
        self.cov.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cov.is_empty()
    }

    pub fn at(&self, t: usize) -> CondMoments {
        CondMoments {
            var_spot: self.var_spot[t],
            var_futures: self.var_futures[t],
            cov: self.cov[t],
        }
    }
}

/// Runs the recursion over the series; `visit(t, H_t, e_s,t, e_f,t)` sees
/// every date. Returns the number of clamped steps. The pre-sample residual is zero and the pre-sample
/// covariance is `start`.
pub(crate) fn run_filter<F>(
    params: &VechParams,
    spec: VechSpec,
    spot: &[f64],
    futures: &[f64],
    start: CondMoments,
    mut visit: F,
) -> Result<usize>
where
    F: FnMut(usize, &CondMoments, f64, f64),
{
    if spot.len() != futures.len() {
        return Err(Error::Misaligned {
            expected: spot.len(),
            found: futures.len(),
        });
    }
    let mut prev = start;
    let (mut es, mut ef) = (0.0, 0.0);
    let mut clamped = 0;
    for t in 0..spot.len() {
        let mut h = next_moments(params, spec, prev, es, ef);
        if !(h.var_spot.is_finite() && h.var_futures.is_finite() && h.cov.is_finite())
            || h.var_spot <= 0.0
            || h.var_futures <= 0.0
        {
            return Err(Error::NonFinite { index: t });
        }
        let was_clamped = h.clamp_correlation();
        if was_clamped {
            clamped += 1;
        }
        if !(h.determinant() > 0.0) {
            return Err(Error::SingularCovariance { index: t });
        }
        es = spot[t] - params.mean.spot;
        ef = futures[t] - params.mean.futures;
        visit(t, &h, es, ef);
        prev = h;
    }
    Ok(clamped)
}

/// Filters over arbitrary slices from an explicit pre-sample covariance.
pub fn filter_series(
    params: &VechParams,
    spec: VechSpec,
    spot: &[f64],
    futures: &[f64],
    start: CondMoments,
) -> Result<MomentPath> {
    params.validate(spec)?;
    let n = spot.len();
    let mut path = MomentPath {
        var_spot: Vec::with_capacity(n),
        var_futures: Vec::with_capacity(n),
        cov: Vec::with_capacity(n),
        resid_spot: Vec::with_capacity(n),
        resid_futures: Vec::with_capacity(n),
        clamped: 0,
    };
    path.clamped = run_filter(params, spec, spot, futures, start, |_, h, es, ef| {
        path.var_spot.push(h.var_spot);
        path.var_futures.push(h.var_futures);
        path.cov.push(h.cov);
        path.resid_spot.push(es);
        path.resid_futures.push(ef);
    })?;
    Ok(path)
}

/// Pre-sample covariance for `pair`: the sample covariance of its in-sample
/// residuals (all observations when `n_in < 2`).
pub(crate) fn presample(pair: &ReturnPair) -> Result<CondMoments> {
    let n = if pair.n_in >= 2 {
        pair.n_in
    } else {
        pair.len()
    };
    if n < 2 {
        return Err(Error::TooShort {
            what: "GARCH filter",
            required: 2,
            available: n,
        });
    }
    let m = CondMoments::sample(&pair.spot[..n], &pair.futures[..n]);
    if !(m.var_spot > 0.0 && m.var_futures > 0.0) {
        return Err(Error::Degenerate("zero sample variance"));
    }
    Ok(m)
}

/// Filters the whole pair, initialized from its in-sample covariance.
pub fn filter_moments(
    params: &VechParams,
    pair: &ReturnPair,
    spec: VechSpec,
) -> Result<MomentPath> {
    filter_series(params, spec, &pair.spot, &pair.futures, presample(pair)?)
}

/// Gaussian bivariate log density contribution, negated.
fn neg_log_density(h: &CondMoments, es: f64, ef: f64) -> f64 {
    let det = h.determinant();
    let quad = (h.var_futures * es * es - 2.0 * h.cov * es * ef + h.var_spot * ef * ef) / det;
    LN_2PI + 0.5 * libm::log(det) + 0.5 * quad
}

pub(crate) fn nll_series(
    params: &VechParams,
    spec: VechSpec,
    spot: &[f64],
    futures: &[f64],
    start: CondMoments,
) -> Result<f64> {
    params.validate(spec)?;
    let mut total = 0.0;
    let clamped = run_filter(params, spec, spot, futures, start, |_, h, es, ef| {
        total += neg_log_density(h, es, ef);
    })?;
    Ok(total + CLAMP_PENALTY * clamped as f64)
}

/// `-sum_t log N(e_t; 0, H_t)` plus [`CLAMP_PENALTY`] per clamped step.
pub fn neg_log_likelihood(params: &VechParams, pair: &ReturnPair, spec: VechSpec) -> Result<f64> {
    nll_series(params, spec, &pair.spot, &pair.futures, presample(pair)?)
}
