//! Synthetic return pairs generated by the VECH recursion.

use alloc::vec::Vec;

use chrono::{Datelike, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::vech::next_moments;
use super::{VechParams, VechSpec};
use crate::market_data::ReturnPair;
use crate::{Error, Result};

const BURN_IN: usize = 250;

/// Shapes standardized innovations `(z_futures, z_spot)`.
///
/// Every simulated step draws two independent standard normals and one
/// uniform, whatever the shape, so datasets generated from the same seed
/// with different shapes share their underlying random numbers. The futures
/// shock drives the common component; the spot shock is the part of spot
/// orthogonal to futures.
pub trait Shocks {
    fn shape(&self, z_futures: f64, z_spot: f64, u: f64) -> (f64, f64);
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GaussianShocks;

impl Shocks for GaussianShocks {
    fn shape(&self, z_futures: f64, z_spot: f64, _u: f64) -> (f64, f64) {
        (z_futures, z_spot)
    }
}

/// Gaussian futures shocks with a negatively skewed spot shock drawn from a
/// two-component normal mixture, rescaled to mean 0 and variance 1.
///
/// With probability `crash_prob` the spot shock comes from
/// `N(crash_mean, crash_sd^2)`, otherwise from `N(m, 1)` with `m` chosen so
/// the mixture mean is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewedSpotShocks {
    pub crash_prob: f64,
    pub crash_mean: f64,
    pub crash_sd: f64,
}

impl Default for SkewedSpotShocks {
    fn default() -> Self {
        SkewedSpotShocks {
            crash_prob: 0.10,
            crash_mean: -1.0,
            crash_sd: 8.0,
        }
    }
}

impl SkewedSpotShocks {
    fn normal_mean(&self) -> f64 {
        -self.crash_prob * self.crash_mean / (1.0 - self.crash_prob)
    }

    fn raw_sd(&self) -> f64 {
        let p = self.crash_prob;
        let m = self.normal_mean();
        libm::sqrt(
            (1.0 - p) * (1.0 + m * m)
                + p * (self.crash_sd * self.crash_sd + self.crash_mean * self.crash_mean),
        )
    }
}

impl Shocks for SkewedSpotShocks {
    fn shape(&self, z_futures: f64, z_spot: f64, u: f64) -> (f64, f64) {
        let raw = if u < self.crash_prob {
            self.crash_mean + self.crash_sd * z_spot
        } else {
            self.normal_mean() + z_spot
        };
        (z_futures, raw / self.raw_sd())
    }
}

fn draw_shocks<S: Shocks, R: Rng + ?Sized>(shocks: &S, rng: &mut R) -> (f64, f64) {
    let zf: f64 = StandardNormal.sample(rng);
    let zs: f64 = StandardNormal.sample(rng);
    let u: f64 = rng.random();
    shocks.shape(zf, zs, u)
}

/// Weekdays starting 2000-01-03.
fn business_days(n: usize) -> Vec<NaiveDate> {
    let mut d = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d.succ_opt().expect("date in range");
    }
    out
}

/// `n` Gaussian observations from the model; deterministic in `seed`.
pub fn simulate_vech(
    params: &VechParams,
    spec: VechSpec,
    n: usize,
    seed: u64,
) -> Result<ReturnPair> {
    simulate_vech_with(params, spec, n, seed, &GaussianShocks)
}

/// Like [`simulate_vech`] with a custom innovation source.
///
/// The recursion starts at the long-run covariance and runs a burn-in
/// before the recorded observations. Innovations are mapped through the
/// Cholesky factor of `H_t` (futures first).
pub fn simulate_vech_with<S: Shocks>(
    params: &VechParams,
    spec: VechSpec,
    n: usize,
    seed: u64,
    shocks: &S,
) -> Result<ReturnPair> {
    params.validate(spec)?;
    let mut h = params
        .unconditional(spec)
        .ok_or(Error::InvalidParams("covariance recursion is not stable"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut es, mut ef) = (0.0, 0.0);
    let mut spot = Vec::with_capacity(n);
    let mut futures = Vec::with_capacity(n);
    for t in 0..BURN_IN + n {
        h = next_moments(params, spec, h, es, ef);
        h.clamp_correlation();
        let (zf, zs) = draw_shocks(shocks, &mut rng);
        let beta = h.cov / h.var_futures;
        let resid_var = (h.var_spot - beta * h.cov).max(0.0);
        ef = libm::sqrt(h.var_futures) * zf;
        es = beta * ef + libm::sqrt(resid_var) * zs;
        if t >= BURN_IN {
            spot.push(params.mean.spot + es);
            futures.push(params.mean.futures + ef);
        }
    }
    ReturnPair::new(business_days(n), spot, futures)
}
