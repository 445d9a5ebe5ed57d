//! Risk measures on a return series: variance, lower partial moments,
//! empirical VaR and CVaR.
//!
//! VaR and CVaR are loss magnitudes (negated returns); a positive value is a
//! loss. The tail size is `k = ceil((1 - x) n)` order statistics with no
//! interpolation, and CVaR is the mean of those `k` worst outcomes.

use alloc::vec::Vec;

use crate::{Error, Result};

pub const DEFAULT_LPM_ORDER: f64 = 3.0;
pub const DEFAULT_LPM_TARGET: f64 = 0.0;
pub const DEFAULT_CONFIDENCE: f64 = 0.99;

// Guards ceil() against representation error in (1 - x) * n.
const TAIL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetricKind {
    Variance,
    Lpm,
    Var,
    Cvar,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] = [
        MetricKind::Variance,
        MetricKind::Lpm,
        MetricKind::Var,
        MetricKind::Cvar,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Variance => "variance",
            MetricKind::Lpm => "lpm",
            MetricKind::Var => "var",
            MetricKind::Cvar => "cvar",
        }
    }
}

impl core::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricKind::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or(Error::InvalidArgument("unknown metric"))
    }
}

/// A metric with its parameters. The horizon is always one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSpec {
    pub kind: MetricKind,
    pub lpm_order: f64,
    pub lpm_target: f64,
    pub confidence: f64,
}

impl MetricSpec {
    pub fn new(kind: MetricKind) -> Self {
        MetricSpec {
            kind,
            lpm_order: DEFAULT_LPM_ORDER,
            lpm_target: DEFAULT_LPM_TARGET,
            confidence: DEFAULT_CONFIDENCE,
        }
    }

    /// The four default metrics with shared LPM and confidence settings.
    pub fn standard_set(lpm_order: f64, lpm_target: f64, confidence: f64) -> [MetricSpec; 4] {
        MetricKind::ALL.map(|kind| MetricSpec {
            kind,
            lpm_order,
            lpm_target,
            confidence,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidArgument("confidence must lie in (0, 1)"));
        }
        if !(self.lpm_order >= 0.0 && self.lpm_order.is_finite()) {
            return Err(Error::InvalidArgument("LPM order must be non-negative"));
        }
        if !self.lpm_target.is_finite() {
            return Err(Error::InvalidArgument("LPM target must be finite"));
        }
        Ok(())
    }

    pub fn evaluate(&self, returns: &[f64]) -> Result<RiskValue> {
        self.validate()?;
        match self.kind {
            MetricKind::Variance => variance(returns),
            MetricKind::Lpm => lpm(returns, self.lpm_order, self.lpm_target),
            MetricKind::Var => value_at_risk(returns, self.confidence),
            MetricKind::Cvar => cvar(returns, self.confidence),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskValue {
    pub kind: MetricKind,
    pub value: f64,
}

/// Sample variance (`n - 1` denominator).
pub fn variance(returns: &[f64]) -> Result<RiskValue> {
    if returns.len() < 2 {
        return Err(Error::TooShort {
            what: "variance",
            required: 2,
            available: returns.len(),
        });
    }
    Ok(RiskValue {
        kind: MetricKind::Variance,
        value: crate::diagnostics::sample_variance(returns),
    })
}

/// `(1/N) sum_t max(0, target - r_t)^order` over all `N` observations.
///
/// Order 0 counts shortfalls, so it is the empirical probability of a return
/// strictly below `target`.
pub fn lpm(returns: &[f64], order: f64, target: f64) -> Result<RiskValue> {
    if returns.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(order >= 0.0) {
        return Err(Error::InvalidArgument("LPM order must be non-negative"));
    }
    let sum: f64 = returns
        .iter()
        .map(|r| {
            let shortfall = target - r;
            if shortfall > 0.0 {
                libm::pow(shortfall, order)
            } else {
                0.0
            }
        })
        .sum();
    Ok(RiskValue {
        kind: MetricKind::Lpm,
        value: sum / returns.len() as f64,
    })
}

/// Number of order statistics in the `1 - confidence` tail.
pub fn tail_count(n: usize, confidence: f64) -> Result<usize> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidArgument("confidence must lie in (0, 1)"));
    }
    let raw = (1.0 - confidence) * n as f64;
    if raw < 1.0 - TAIL_SLACK {
        let required = libm::ceil(1.0 / (1.0 - confidence) - TAIL_SLACK) as usize;
        return Err(Error::TooShort {
            what: "tail estimate",
            required,
            available: n,
        });
    }
    Ok((libm::ceil(raw - TAIL_SLACK) as usize).max(1))
}

fn worst(returns: &[f64], k: usize) -> Vec<f64> {
    let mut v = returns.to_vec();
    if k < v.len() {
        v.select_nth_unstable_by(k - 1, |a, b| a.total_cmp(b));
        v.truncate(k);
    }
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Negated `k`-th smallest return.
pub fn value_at_risk(returns: &[f64], confidence: f64) -> Result<RiskValue> {
    if returns.iter().any(|r| r.is_nan()) {
        return Err(Error::Degenerate("NaN return"));
    }
    let k = tail_count(returns.len(), confidence)?;
    let tail = worst(returns, k);
    Ok(RiskValue {
        kind: MetricKind::Var,
        value: -tail[k - 1],
    })
}

/// Mean loss over the `k` worst returns (inclusive of the VaR point).
pub fn cvar(returns: &[f64], confidence: f64) -> Result<RiskValue> {
    if returns.iter().any(|r| r.is_nan()) {
        return Err(Error::Degenerate("NaN return"));
    }
    let k = tail_count(returns.len(), confidence)?;
    let tail = worst(returns, k);
    Ok(RiskValue {
        kind: MetricKind::Cvar,
        value: -tail.iter().sum::<f64>() / k as f64,
    })
}
