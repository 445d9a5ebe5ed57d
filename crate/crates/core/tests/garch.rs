use hedgekit_core::hedge::{
    filter_moments, fit_vech, neg_log_likelihood, next_moments, simulate_vech, CondMoments,
    FitOptions, IndicatorRule, SpotFutures, VechParams, VechSpec, VechTerm,
};
use hedgekit_core::market_data::ReturnPair;
use hedgekit_core::Error;

/// a = 0.05 and a + b + d/2 = 0.95 in each variance equation.
fn params(d: f64) -> VechParams {
    let b = 0.90 - d / 2.0;
    VechParams {
        mean: SpotFutures {
            spot: 2e-4,
            futures: 1e-4,
        },
        intercept: VechTerm {
            spot: 5e-6,
            futures: 5e-6,
            cross: 4e-6,
        },
        arch: VechTerm {
            spot: 0.05,
            futures: 0.05,
            cross: 0.05,
        },
        garch: VechTerm {
            spot: b,
            futures: b,
            cross: b,
        },
        asymmetry: SpotFutures { spot: d, futures: d },
    }
}

#[test]
fn asymmetric_filter_with_zero_d_nests_symmetric() {
    let pair = simulate_vech(&params(0.0), VechSpec::symmetric(), 260, 42).unwrap();
    let sym = filter_moments(&params(0.0), &pair, VechSpec::symmetric()).unwrap();
    for indicator in [IndicatorRule::Own, IndicatorRule::Joint] {
        let spec = VechSpec::asymmetric().with_indicator(indicator);
        let asym = filter_moments(&params(0.0), &pair, spec).unwrap();
        for t in 0..pair.len() {
            assert!((sym.var_spot[t] - asym.var_spot[t]).abs() <= 1e-12);
            assert!((sym.var_futures[t] - asym.var_futures[t]).abs() <= 1e-12);
            assert!((sym.cov[t] - asym.cov[t]).abs() <= 1e-12);
        }
    }
}

#[test]
fn filter_is_invariant_to_a_common_shift_of_returns_and_means() {
    let p = params(0.1);
    let spec = VechSpec::asymmetric();
    let pair = simulate_vech(&p, spec, 300, 9).unwrap();
    let base = filter_moments(&p, &pair, spec).unwrap();
    let k = 0.003;
    let shifted = ReturnPair::new(
        pair.dates.clone(),
        pair.spot.iter().map(|v| v + k).collect(),
        pair.futures.iter().map(|v| v + k).collect(),
    )
    .unwrap();
    let mut q = p;
    q.mean.spot += k;
    q.mean.futures += k;
    let moved = filter_moments(&q, &shifted, spec).unwrap();
    for t in 0..pair.len() {
        assert!((base.var_spot[t] - moved.var_spot[t]).abs() <= 1e-12 * base.var_spot[t].max(1e-300) + 1e-18);
        assert!((base.cov[t] - moved.cov[t]).abs() <= 1e-16);
        assert!((base.resid_spot[t] - moved.resid_spot[t]).abs() <= 1e-15);
    }
}

#[test]
fn negative_shock_adds_exactly_d_x_squared() {
    let p = params(0.1);
    let prev = CondMoments {
        var_spot: 2e-4,
        var_futures: 3e-4,
        cov: 1e-4,
    };
    for x in [0.001, 0.02, 0.3, 1.7] {
        let up = next_moments(&p, VechSpec::asymmetric(), prev, x, x);
        let down = next_moments(&p, VechSpec::asymmetric(), prev, -x, -x);
        let gap = down.var_futures - up.var_futures;
        assert!((gap - 0.1 * x * x).abs() <= 1e-15 * (1.0 + x * x), "x={x}");
        assert!((down.var_spot - up.var_spot - 0.1 * x * x).abs() <= 1e-15 * (1.0 + x * x));
        assert_eq!(down.cov, up.cov);
    }
    // joint rule: a lone negative futures shock does not trigger
    let joint = VechSpec::asymmetric().with_indicator(IndicatorRule::Joint);
    let a = next_moments(&p, joint, prev, 0.01, -0.02);
    let b = next_moments(&p, joint, prev, 0.01, 0.02);
    assert_eq!(a.var_futures, b.var_futures);
}

#[test]
fn hand_worked_futures_step() {
    let p = VechParams {
        intercept: VechTerm {
            spot: 0.1,
            futures: 0.1,
            cross: 0.0,
        },
        arch: VechTerm {
            spot: 0.2,
            futures: 0.2,
            cross: 0.0,
        },
        garch: VechTerm {
            spot: 0.5,
            futures: 0.5,
            cross: 0.0,
        },
        asymmetry: SpotFutures {
            spot: 0.1,
            futures: 0.1,
        },
        ..Default::default()
    };
    let prev = CondMoments {
        var_spot: 1.0,
        var_futures: 1.0,
        cov: 0.0,
    };
    let sym = next_moments(&p, VechSpec::symmetric(), prev, 0.0, 0.3);
    assert!((sym.var_futures - 0.618).abs() < 1e-15);
    let neg = next_moments(&p, VechSpec::asymmetric(), prev, 0.0, -0.3);
    assert!((neg.var_futures - 0.627).abs() < 1e-15);
    let pos = next_moments(&p, VechSpec::asymmetric(), prev, 0.0, 0.3);
    assert!((pos.var_futures - 0.618).abs() < 1e-15);
}

#[test]
fn constant_covariance_simulation_matches_intercepts() {
    let p = VechParams {
        intercept: VechTerm {
            spot: 4e-4,
            futures: 9e-4,
            cross: 4.8e-4,
        },
        ..Default::default()
    };
    let pair = simulate_vech(&p, VechSpec::symmetric(), 10_000, 1).unwrap();
    let m = CondMoments::sample(&pair.spot, &pair.futures);
    assert!((m.var_spot / 4e-4 - 1.0).abs() < 0.05, "{m:?}");
    assert!((m.var_futures / 9e-4 - 1.0).abs() < 0.05);
    assert!((m.cov / 4.8e-4 - 1.0).abs() < 0.05);
}

#[test]
fn simulation_is_bit_identical_per_seed() {
    let a = simulate_vech(&params(0.1), VechSpec::asymmetric(), 500, 77).unwrap();
    let b = simulate_vech(&params(0.1), VechSpec::asymmetric(), 500, 77).unwrap();
    let c = simulate_vech(&params(0.1), VechSpec::asymmetric(), 500, 78).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.spot, c.spot);
}

#[test]
fn variance_is_higher_after_negative_shocks() {
    let mut p = params(0.0);
    p.arch.spot = 0.02;
    p.asymmetry.spot = 0.12;
    p.garch.spot = 0.85;
    let pair = simulate_vech(&p, VechSpec::asymmetric(), 20_000, 5).unwrap();
    let e: Vec<f64> = pair.spot.iter().map(|v| v - p.mean.spot).collect();
    let sd = (e.iter().map(|v| v * v).sum::<f64>() / e.len() as f64).sqrt();
    // compare next-day squared residuals after shocks of similar size
    let (mut neg, mut nn, mut pos, mut np) = (0.0, 0, 0.0, 0);
    for t in 1..e.len() {
        let z = e[t - 1] / sd;
        if (0.5..2.0).contains(&z.abs()) {
            if z < 0.0 {
                neg += e[t] * e[t];
                nn += 1;
            } else {
                pos += e[t] * e[t];
                np += 1;
            }
        }
    }
    let (neg, pos) = (neg / nn as f64, pos / np as f64);
    assert!(neg > pos * 1.05, "after negative {neg}, after positive {pos}");
}

#[test]
fn iid_data_fit_is_close_to_constant_covariance_fit() {
    let flat = VechParams {
        intercept: VechTerm {
            spot: 1e-4,
            futures: 1.2e-4,
            cross: 0.8e-4,
        },
        ..Default::default()
    };
    let pair = simulate_vech(&flat, VechSpec::symmetric(), 2000, 21).unwrap();
    let fit = fit_vech(pair.view(), VechSpec::symmetric(), FitOptions::default()).unwrap();
    // the a = b = 0 optimum is the sample mean and covariance (n denominator)
    let n = pair.len() as f64;
    let m = CondMoments::sample(&pair.spot, &pair.futures);
    let scale = (n - 1.0) / n;
    let constant = VechParams {
        mean: SpotFutures {
            spot: pair.spot.iter().sum::<f64>() / n,
            futures: pair.futures.iter().sum::<f64>() / n,
        },
        intercept: VechTerm {
            spot: m.var_spot * scale,
            futures: m.var_futures * scale,
            cross: m.cov * scale,
        },
        ..Default::default()
    };
    let nll0 = neg_log_likelihood(&constant, &pair, VechSpec::symmetric()).unwrap();
    assert!(fit.converged);
    assert!(fit.neg_log_likelihood <= nll0 + 1e-6);
    assert!(nll0 - fit.neg_log_likelihood < 2.0, "{} vs {}", fit.neg_log_likelihood, nll0);
    assert!(fit.neg_log_likelihood <= fit.initial_neg_log_likelihood);
}

#[test]
fn identical_series_are_rejected() {
    let pair = simulate_vech(&params(0.0), VechSpec::symmetric(), 200, 3).unwrap();
    let same = ReturnPair::new(pair.dates.clone(), pair.futures.clone(), pair.futures.clone()).unwrap();
    assert!(matches!(
        fit_vech(same.view(), VechSpec::symmetric(), FitOptions::default()),
        Err(Error::Degenerate(_))
    ));
}

#[test]
fn non_stationary_params_are_rejected_before_filtering() {
    let mut p = params(0.0);
    p.garch.spot = 0.96;
    let pair = simulate_vech(&params(0.0), VechSpec::symmetric(), 50, 3).unwrap();
    assert!(matches!(
        neg_log_likelihood(&p, &pair, VechSpec::symmetric()),
        Err(Error::InvalidParams(_))
    ));
}
