//! Maximum-likelihood estimation of the diagonal VECH models.
//!
//! Returns are rescaled to unit sample variance before optimizing. The
//! search runs on an unconstrained vector:
//! - means: identity
//! - variance intercepts: `exp`
//! - cross intercept: `tanh(t) * sqrt(c_s c_f)`
//! - each variance equation's `(a, b, d/2)`: `w_i / (1 + sum w)` with
//!   `w_i = exp(t_i)`, which keeps `a + b + d/2 < 1`
//! - cross ARCH and GARCH terms: `sin(t) * sqrt(a_s a_f)` and
//!   `sin(t) * sqrt(b_s b_f)`
//!
//! With `C` positive definite and the ARCH and GARCH coefficient matrices
//! positive semidefinite, every `H_t` is positive definite (Schur product),
//! so the search never meets the correlation clamp.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use super::vech::{filter_series, nll_series, presample};
use super::{
    garch_hedge_ratios, CondMoments, HedgeRatioSeries, ModelId, SpotFutures, VechParams, VechSpec,
    VechTerm, MAX_CORRELATION,
};
use crate::market_data::{PairView, ReturnPair};
use crate::optim::{Bfgs, NelderMead};
use crate::{Error, Result};

/// Fewest observations [`fit_vech`] accepts.
pub const MIN_FIT_LEN: usize = 100;

/// Saturation bound on the unconstrained coordinates. Near-flat likelihoods
/// otherwise drift toward the unit-persistence corner without ever settling.
const THETA_BOUND: f64 = 20.0;

/// Cap on simplex restarts after the multi-start stage.
const MAX_RESTARTS: usize = 10;

/// Starting cross coefficients as a share of their upper bound.
const START_CROSS_RATIO: f64 = 0.95;

/// (ARCH, GARCH) pairs used as the deterministic starting points.
const STARTS: [(f64, f64); 3] = [(0.05, 0.90), (0.10, 0.80), (0.03, 0.95)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Iteration cap for each optimizer run.
    pub max_iter: usize,
    /// Relative objective tolerance.
    pub tol: f64,
    /// How many of the built-in starting points to try (1..=3).
    pub starts: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iter: 2000,
            tol: 1e-8,
            starts: 3,
        }
    }
}

/// Outcome of [`fit_vech`].
#[derive(Debug, Clone, PartialEq)]
pub struct VechFit {
    pub params: VechParams,
    pub spec: VechSpec,
    pub neg_log_likelihood: f64,
    /// Objective at the first starting point.
    pub initial_neg_log_likelihood: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Clamped covariance steps at the optimum.
    pub clamped: usize,
    pub nobs: usize,
}

struct Scaling {
    spot: f64,
    futures: f64,
}

fn softmax_unit(w: &[f64]) -> Vec<f64> {
    let e: Vec<f64> = w.iter().map(|t| libm::exp(*t)).collect();
    let denom = 1.0 + e.iter().sum::<f64>();
    e.iter().map(|v| v / denom).collect()
}

fn decode(theta: &[f64], spec: VechSpec) -> VechParams {
    let clipped: Vec<f64> = theta
        .iter()
        .map(|t| t.clamp(-THETA_BOUND, THETA_BOUND))
        .collect();
    let theta = clipped.as_slice();
    let c_s = libm::exp(theta[2]);
    let c_f = libm::exp(theta[3]);
    let (spot, futures) = if spec.asymmetric {
        let s = softmax_unit(&[theta[5], theta[6], theta[11]]);
        let f = softmax_unit(&[theta[7], theta[8], theta[12]]);
        ((s[0], s[1], 2.0 * s[2]), (f[0], f[1], 2.0 * f[2]))
    } else {
        let s = softmax_unit(&[theta[5], theta[6]]);
        let f = softmax_unit(&[theta[7], theta[8]]);
        ((s[0], s[1], 0.0), (f[0], f[1], 0.0))
    };
    VechParams {
        mean: SpotFutures {
            spot: theta[0],
            futures: theta[1],
        },
        intercept: VechTerm {
            spot: c_s,
            futures: c_f,
            cross: libm::tanh(theta[4]) * libm::sqrt(c_s * c_f),
        },
        arch: VechTerm {
            spot: spot.0,
            futures: futures.0,
            cross: libm::sin(theta[9]) * libm::sqrt(spot.0 * futures.0),
        },
        garch: VechTerm {
            spot: spot.1,
            futures: futures.1,
            cross: libm::sin(theta[10]) * libm::sqrt(spot.1 * futures.1),
        },
        asymmetry: SpotFutures {
            spot: spot.2,
            futures: futures.2,
        },
    }
}

/// Inverse of the simplex-weight map for `(a, b, d/2)`; all must be positive.
fn encode_unit(parts: &[f64]) -> Vec<f64> {
    let rest = 1.0 - parts.iter().sum::<f64>();
    parts.iter().map(|p| libm::log(p / rest)).collect()
}

fn start_vector(
    start: (f64, f64),
    sample: &CondMoments,
    means: (f64, f64),
    spec: VechSpec,
) -> Vec<f64> {
    let (a, b) = start;
    let (a_var, d) = if spec.asymmetric {
        (a / 2.0, a)
    } else {
        (a, 0.0)
    };
    let c_s = sample.var_spot * (1.0 - a - b);
    let c_f = sample.var_futures * (1.0 - a - b);
    let corr = (sample.cov / libm::sqrt(sample.var_spot * sample.var_futures)).clamp(-0.99, 0.99);
    let mut theta = vec![
        means.0,
        means.1,
        libm::log(c_s),
        libm::log(c_f),
        libm::atanh(corr),
    ];
    let parts: Vec<f64> = if spec.asymmetric {
        vec![a_var, b, d / 2.0]
    } else {
        vec![a_var, b]
    };
    let unit = encode_unit(&parts);
    theta.extend([unit[0], unit[1], unit[0], unit[1]]);
    let cross = libm::asin(START_CROSS_RATIO);
    theta.extend([cross, cross]);
    if spec.asymmetric {
        theta.extend([unit[2], unit[2]]);
    }
    theta
}

fn unscale(p: VechParams, s: &Scaling) -> VechParams {
    VechParams {
        mean: SpotFutures {
            spot: p.mean.spot * s.spot,
            futures: p.mean.futures * s.futures,
        },
        intercept: VechTerm {
            spot: p.intercept.spot * s.spot * s.spot,
            futures: p.intercept.futures * s.futures * s.futures,
            cross: p.intercept.cross * s.spot * s.futures,
        },
        ..p
    }
}

/// Fits the symmetric or asymmetric model to `pair` by maximum likelihood.
///
/// The pre-sample covariance is the sample covariance of `pair`. Fails with
/// [`Error::NonConvergence`] (carrying the best point found) when neither
/// the simplex restarts nor the BFGS polish meet the tolerance.
pub fn fit_vech(pair: PairView<'_>, spec: VechSpec, options: FitOptions) -> Result<VechFit> {
    let n = pair.len();
    if n < MIN_FIT_LEN {
        return Err(Error::TooShort {
            what: "GARCH estimation",
            required: MIN_FIT_LEN,
            available: n,
        });
    }
    let sample = CondMoments::sample(pair.spot, pair.futures);
    if !(sample.var_spot > 0.0 && sample.var_futures > 0.0) {
        return Err(Error::Degenerate("zero sample variance"));
    }
    let corr = sample.cov / libm::sqrt(sample.var_spot * sample.var_futures);
    if libm::fabs(corr) >= MAX_CORRELATION {
        return Err(Error::Degenerate(
            "spot and futures returns are perfectly correlated",
        ));
    }

    let scale = Scaling {
        spot: libm::sqrt(sample.var_spot),
        futures: libm::sqrt(sample.var_futures),
    };
    let spot: Vec<f64> = pair.spot.iter().map(|v| v / scale.spot).collect();
    let futures: Vec<f64> = pair.futures.iter().map(|v| v / scale.futures).collect();
    let scaled_start = CondMoments::sample(&spot, &futures);
    let means = (
        spot.iter().sum::<f64>() / n as f64,
        futures.iter().sum::<f64>() / n as f64,
    );
    let objective = |theta: &[f64]| {
        nll_series(&decode(theta, spec), spec, &spot, &futures, scaled_start)
            .unwrap_or(f64::INFINITY)
    };

    let nm = NelderMead {
        max_iter: options.max_iter,
        ftol: options.tol,
        initial_step: 0.25,
    };
    let starts = options.starts.clamp(1, STARTS.len());
    let mut iterations = 0;
    let mut evaluations = 0;
    let mut best: Option<crate::optim::Minimum> = None;
    let mut initial = f64::INFINITY;
    for (k, start) in STARTS.iter().take(starts).enumerate() {
        let theta0 = start_vector(*start, &scaled_start, means, spec);
        if k == 0 {
            initial = objective(&theta0);
        }
        let m = nm.minimize(objective, &theta0);
        iterations += m.iterations;
        evaluations += m.evaluations;
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let mut best = best.expect("at least one start");
    // Restart the simplex from the incumbent until a restart stops improving.
    // Convergence means the last simplex met the objective tolerance within
    // its iteration cap, or the BFGS polish converged.
    let mut converged = false;
    for _ in 0..MAX_RESTARTS {
        let restart = nm.minimize(objective, &best.x);
        iterations += restart.iterations;
        evaluations += restart.evaluations;
        converged = restart.converged;
        let gain = best.value - restart.value;
        if restart.value <= best.value {
            best = restart;
        }
        if gain <= options.tol * (1.0 + libm::fabs(best.value)) {
            break;
        }
    }
    let bfgs = Bfgs {
        max_iter: options.max_iter,
        ftol: options.tol,
        ..Bfgs::default()
    };
    let polished = bfgs.minimize(objective, &best.x);
    iterations += polished.iterations;
    evaluations += polished.evaluations;
    converged |= polished.converged;
    if polished.value <= best.value {
        best = polished;
    }

    let params = unscale(decode(&best.x, spec), &scale);
    let start = CondMoments::sample(pair.spot, pair.futures);
    let path = filter_series(&params, spec, pair.spot, pair.futures, start)?;
    let nll = nll_series(&params, spec, pair.spot, pair.futures, start)?;
    let init_params = unscale(
        decode(&start_vector(STARTS[0], &scaled_start, means, spec), spec),
        &scale,
    );
    let initial_orig =
        nll_series(&init_params, spec, pair.spot, pair.futures, start).unwrap_or(initial);
    let fit = VechFit {
        params,
        spec,
        neg_log_likelihood: nll,
        initial_neg_log_likelihood: initial_orig,
        iterations,
        evaluations,
        converged,
        clamped: path.clamped,
        nobs: n,
    };
    if !converged {
        return Err(Error::NonConvergence(Box::new(fit)));
    }
    Ok(fit)
}

/// In- and out-of-sample GARCH hedge ratios plus every fit performed.
#[derive(Debug, Clone, PartialEq)]
pub struct VechHedge {
    pub fits: Vec<VechFit>,
    pub in_sample: HedgeRatioSeries,
    pub out_of_sample: HedgeRatioSeries,
}

/// Fits on the in-sample window and filters forward through the
/// out-of-sample dates.
///
/// With `refit_every = Some(k)`, the out-of-sample period is cut into blocks
/// of `k` dates; each block is re-fitted on the `n_in` observations before
/// it and filtered from that window's sample covariance.
pub fn vech_hedge(
    pair: &ReturnPair,
    spec: VechSpec,
    options: FitOptions,
    refit_every: Option<usize>,
) -> Result<VechHedge> {
    let model = if spec.asymmetric {
        ModelId::Asdvech
    } else {
        ModelId::Sdvech
    };
    let first = fit_vech(pair.in_sample(), spec, options)?;
    let path = filter_series(
        &first.params,
        spec,
        &pair.spot,
        &pair.futures,
        presample(pair)?,
    )?;
    let all = garch_hedge_ratios(model, &pair.dates, &path)?;
    let n_in = pair.n_in;
    let in_sample = HedgeRatioSeries {
        model,
        dates: all.dates[..n_in].to_vec(),
        beta: all.beta[..n_in].to_vec(),
    };
    let mut fits = vec![first];
    let out_beta = match refit_every {
        None | Some(0) => all.beta[n_in..].to_vec(),
        Some(k) => {
            let mut beta = Vec::with_capacity(pair.n_out);
            let end = pair.len();
            let mut block = n_in;
            while block < end {
                let lo = block - n_in;
                let hi = (block + k).min(end);
                let window = PairView {
                    dates: &pair.dates[lo..block],
                    spot: &pair.spot[lo..block],
                    futures: &pair.futures[lo..block],
                };
                let fit = fit_vech(window, spec, options)?;
                let start = CondMoments::sample(window.spot, window.futures);
                let p = filter_series(
                    &fit.params,
                    spec,
                    &pair.spot[lo..hi],
                    &pair.futures[lo..hi],
                    start,
                )?;
                beta.extend(
                    p.cov[n_in..]
                        .iter()
                        .zip(&p.var_futures[n_in..])
                        .map(|(c, v)| c / v),
                );
                fits.push(fit);
                block = hi;
            }
            beta
        }
    };
    Ok(VechHedge {
        fits,
        in_sample,
        out_of_sample: HedgeRatioSeries {
            model,
            dates: pair.dates[n_in..].to_vec(),
            beta: out_beta,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_vector_round_trips_through_decode() {
        let sample = CondMoments {
            var_spot: 1.0,
            var_futures: 1.0,
            cov: 0.8,
        };
        for spec in [VechSpec::symmetric(), VechSpec::asymmetric()] {
            for start in STARTS {
                let p = decode(&start_vector(start, &sample, (0.01, -0.02), spec), spec);
                let (a, b) = start;
                let a_var = if spec.asymmetric { a / 2.0 } else { a };
                assert!((p.arch.spot - a_var).abs() < 1e-12);
                assert!((p.garch.futures - b).abs() < 1e-12);
                assert!((p.arch.cross - START_CROSS_RATIO * a_var).abs() < 1e-12);
                assert!((p.garch.cross - START_CROSS_RATIO * b).abs() < 1e-12);
                assert!((p.persistence(spec).spot - (a + b)).abs() < 1e-12);
                assert!((p.intercept.cross - 0.8 * (1.0 - a - b)).abs() < 1e-12);
                assert_eq!(p.mean.futures, -0.02);
                assert!(p.validate(spec).is_ok());
            }
        }
    }

    #[test]
    fn decoded_params_are_always_admissible() {
        let spec = VechSpec::asymmetric();
        for k in 0..50 {
            let theta: Vec<f64> = (0..13)
                .map(|i| libm::sin((k * 13 + i) as f64) * 6.0)
                .collect();
            let p = decode(&theta, spec);
            assert!(p.validate(spec).is_ok());
            assert!(p.arch.cross.abs() <= libm::sqrt(p.arch.spot * p.arch.futures));
            assert!(p.garch.cross.abs() <= libm::sqrt(p.garch.spot * p.garch.futures));
        }
    }

    #[test]
    fn decoded_params_never_clamp() {
        let spec = VechSpec::asymmetric();
        let spot: Vec<f64> = (0..300).map(|t| libm::sin(t as f64 * 1.3) * (1.0 + (t % 7) as f64)).collect();
        let futures: Vec<f64> = (0..300).map(|t| libm::cos(t as f64 * 0.4) * (1.0 + (t % 5) as f64)).collect();
        let start = CondMoments::sample(&spot, &futures);
        for k in 0..50 {
            let theta: Vec<f64> = (0..13)
                .map(|i| libm::sin((k * 17 + i) as f64) * 8.0)
                .collect();
            let path = filter_series(&decode(&theta, spec), spec, &spot, &futures, start).unwrap();
            assert_eq!(path.clamped, 0);
        }
    }
}
