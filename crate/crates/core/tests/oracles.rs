//! Library results against independent, deliberately naive reimplementations.

use hedgekit_core::hedge::{
    neg_log_likelihood, ols_hedge, ols_window_fit, OlsScheme, SpotFutures,
    VechParams, VechSpec, VechTerm, OLS_WARMUP,
};
use hedgekit_core::market_data::ReturnPair;
use hedgekit_core::risk::{cvar, lpm, value_at_risk};
use hedgekit_core::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn dates(n: usize) -> Vec<NaiveDate> {
    let d0 = NaiveDate::from_ymd_opt(2001, 1, 1).unwrap();
    (0..n).map(|i| d0 + chrono::Duration::days(i as i64)).collect()
}

fn normals(rng: &mut ChaCha8Rng, n: usize, sd: f64) -> Vec<f64> {
    (0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn two_pass_beta(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let beta = sxy / sxx;
    (my - beta * mx, beta)
}

#[test]
fn ols_matches_two_pass_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let f = normals(&mut rng, 20, 0.02);
        let s: Vec<f64> = f
            .iter()
            .map(|v| 0.8 * v + 0.01 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let pair = ReturnPair::new(dates(20), s.clone(), f.clone()).unwrap();
        let fit = ols_window_fit(pair.view(), 0..20).unwrap();
        let (alpha, beta) = two_pass_beta(&f, &s);
        assert!((fit.beta - beta).abs() < 1e-12, "{} vs {}", fit.beta, beta);
        assert!((fit.alpha - alpha).abs() < 1e-12);
    }
}

#[test]
fn rolling_ols_matches_per_window_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n_in = 160;
    let n = 260;
    let f = normals(&mut rng, n, 0.02);
    // slope drifts from 0.3 to 1.2 so windows disagree
    let s: Vec<f64> = f
        .iter()
        .enumerate()
        .map(|(t, v)| (0.3 + 0.9 * t as f64 / n as f64) * v + 0.005 * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let pair = ReturnPair::new(dates(n), s.clone(), f.clone())
        .unwrap()
        .with_split(n_in, n - n_in)
        .unwrap();
    let window = 60;
    let ins = ols_hedge(&pair, window, false, OlsScheme::Rolling).unwrap();
    for t in 0..n_in {
        let (lo, hi) = if t <= OLS_WARMUP {
            (0, OLS_WARMUP)
        } else {
            (t.saturating_sub(window), t)
        };
        let (_, b) = two_pass_beta(&f[lo..hi], &s[lo..hi]);
        assert!((ins.beta[t] - b).abs() < 1e-12, "in-sample t={t}");
    }
    let out = ols_hedge(&pair, window, true, OlsScheme::Rolling).unwrap();
    for (i, t) in (n_in..n).enumerate() {
        let (_, b) = two_pass_beta(&f[t - window..t], &s[t - window..t]);
        assert!((out.beta[i] - b).abs() < 1e-12, "out-of-sample t={t}");
    }
    let full = ols_hedge(&pair, window, false, OlsScheme::FullSample).unwrap();
    let (_, b) = two_pass_beta(&f[..n_in], &s[..n_in]);
    assert!(full.beta.iter().all(|v| (v - b).abs() < 1e-12));
    assert!((full.beta[0] - ins.beta[n_in - 1]).abs() > 1e-3);
}

fn constant_params() -> VechParams {
    VechParams {
        mean: SpotFutures {
            spot: 0.001,
            futures: -0.0005,
        },
        intercept: VechTerm {
            spot: 4e-4,
            futures: 5e-4,
            cross: 3e-4,
        },
        ..Default::default()
    }
}

#[test]
fn likelihood_matches_bivariate_density_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = constant_params();
    let f = normals(&mut rng, 50, 0.02);
    let s: Vec<f64> = f.iter().map(|v| 0.6 * v + 0.01 * rng.sample::<f64, _>(StandardNormal)).collect();
    let pair = ReturnPair::new(dates(50), s.clone(), f.clone()).unwrap();
    let nll = neg_log_likelihood(&p, &pair, VechSpec::symmetric()).unwrap();

    // density of N(mu, Sigma) written out via the correlation form
    let (vs, vf, c) = (p.intercept.spot, p.intercept.futures, p.intercept.cross);
    let (ss, sf) = (vs.sqrt(), vf.sqrt());
    let rho = c / (ss * sf);
    let mut oracle = 0.0;
    for t in 0..50 {
        let zs = (s[t] - p.mean.spot) / ss;
        let zf = (f[t] - p.mean.futures) / sf;
        let q = (zs * zs - 2.0 * rho * zs * zf + zf * zf) / (1.0 - rho * rho);
        let dens = (-0.5 * q).exp()
            / (2.0 * std::f64::consts::PI * ss * sf * (1.0 - rho * rho).sqrt());
        oracle -= dens.ln();
    }
    assert!(close(nll, oracle, 1e-10), "{nll} vs {oracle}");
}

#[test]
fn standard_normal_at_the_mode() {
    let p = VechParams {
        intercept: VechTerm {
            spot: 1.0,
            futures: 1.0,
            cross: 0.0,
        },
        ..Default::default()
    };
    // with a = b = 0 every H_t equals C whatever the pre-sample matrix
    let p1 = ReturnPair::new(dates(3), vec![0.0, 1.0, -1.0], vec![0.0, 1.0, -1.0]).unwrap();
    let one = neg_log_likelihood(&p, &p1, VechSpec::symmetric()).unwrap();
    // first term is the density at the mode; the other two sit at (1,1) and (-1,-1)
    let expected = 3.0 * (2.0 * std::f64::consts::PI).ln() + 2.0 * 1.0;
    assert!((one - expected).abs() < 1e-12, "{one} vs {expected}");
}

fn sorted(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn oracle_tail(x: &[f64], conf: f64) -> (f64, f64) {
    let n = x.len();
    let mut k = 1;
    while (k as f64) < (1.0 - conf) * n as f64 - 1e-9 {
        k += 1;
    }
    let s = sorted(x);
    let var = -s[k - 1];
    let cvar = -s[..k].iter().sum::<f64>() / k as f64;
    (var, cvar)
}

fn oracle_lpm(x: &[f64], order: f64, target: f64) -> f64 {
    let mut total = 0.0;
    for &r in x {
        if r < target {
            total += (target - r).powf(order);
        }
    }
    total / x.len() as f64
}

#[test]
fn tail_metrics_match_sort_and_sum_oracles() {
    let start = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let confidences = [0.9, 0.95, 0.975, 0.99];
    for i in 0..1000 {
        let n = rng.random_range(100..=1000);
        let x: Vec<f64> = if i % 2 == 0 {
            (0..n).map(|_| rng.random_range(-0.1..0.1)).collect()
        } else {
            normals(&mut rng, n, 0.03)
        };
        for &c in &confidences {
            let (v, cv) = oracle_tail(&x, c);
            let got_v = value_at_risk(&x, c).unwrap().value;
            let got_cv = cvar(&x, c).unwrap().value;
            assert!((got_v - v).abs() <= 1e-12, "VaR n={n} c={c}");
            assert!((got_cv - cv).abs() <= 1e-12, "CVaR n={n} c={c}");
            assert!(got_cv >= got_v);
        }
        for (order, target) in [(0.0, 0.0), (1.0, 0.0), (2.0, 0.01), (3.0, 0.0), (2.5, -0.01)] {
            let got = lpm(&x, order, target).unwrap().value;
            assert!(close(got, oracle_lpm(&x, order, target), 1e-12), "LPM n={n} order={order}");
        }
        let below = x.iter().filter(|r| **r < 0.0).count() as f64 / n as f64;
        assert_eq!(lpm(&x, 0.0, 0.0).unwrap().value, below);
    }
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn documented_worked_examples() {
    let lp = lpm(&[-0.2, 0.1, -0.1, 0.3], 3.0, 0.0).unwrap().value;
    assert!((lp - 0.00225).abs() < 1e-15);
    assert_eq!(lpm(&[-1.0, 1.0, 1.0, -1.0], 0.0, 0.0).unwrap().value, 0.5);
    let mut x = vec![0.01; 200];
    x[17] = -0.10;
    x[120] = -0.08;
    assert!((cvar(&x, 0.99).unwrap().value - 0.09).abs() < 1e-15);
    assert!((value_at_risk(&x, 0.99).unwrap().value - 0.08).abs() < 1e-15);
    assert_eq!(value_at_risk(&[0.01; 100], 0.99).unwrap().value, -0.01);
}
