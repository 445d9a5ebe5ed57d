//! Synthetic price files from the GARCH simulator, for fixtures and demos.

use chrono::Datelike;
use hedgekit_core::hedge::{
    simulate_vech, simulate_vech_with, SkewedSpotShocks, SpotFutures, VechParams, VechSpec,
    VechTerm,
};
use hedgekit_core::market_data::ReturnPair;
use hedgekit_core::NaiveDate;

use crate::io::{csv_bytes, num};

/// Daily SDVECH with persistence 0.95 and long-run correlation `rho`.
pub fn default_params(rho: f64) -> VechParams {
    let c = 5e-6;
    VechParams {
        mean: SpotFutures::default(),
        intercept: VechTerm {
            spot: c,
            futures: c,
            cross: c * rho,
        },
        arch: VechTerm {
            spot: 0.05,
            futures: 0.05,
            cross: 0.05,
        },
        garch: VechTerm {
            spot: 0.90,
            futures: 0.90,
            cross: 0.90,
        },
        asymmetry: SpotFutures::default(),
    }
}

/// `n` return pairs; `skewed` swaps in negatively skewed spot shocks that
/// share the symmetric run's random numbers.
pub fn returns(n: usize, seed: u64, skewed: bool) -> hedgekit_core::Result<ReturnPair> {
    let p = default_params(0.8);
    if skewed {
        simulate_vech_with(&p, VechSpec::symmetric(), n, seed, &SkewedSpotShocks::default())
    } else {
        simulate_vech(&p, VechSpec::symmetric(), n, seed)
    }
}

/// `n` consecutive weekdays from 2000-01-03.
pub fn weekdays(n: usize) -> Vec<NaiveDate> {
    let mut d = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        if d.weekday().number_from_monday() <= 5 {
            out.push(d);
        }
        d = d.succ_opt().expect("date in range");
    }
    out
}

fn prices(start: f64, returns: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(returns.len() + 1);
    p.push(start);
    for r in returns {
        let last = *p.last().expect("non-empty");
        p.push(last * r.exp());
    }
    p
}

/// `date,spot,futures` prices: `pair.len() + 1` rows.
pub fn aligned_csv(pair: &ReturnPair) -> Vec<u8> {
    let s = prices(100.0, &pair.spot);
    let f = prices(101.0, &pair.futures);
    let d = weekdays(s.len());
    csv_bytes(
        &["date", "spot", "futures"],
        (0..s.len()).map(|t| [d[t].to_string(), num(round6(s[t])), num(round6(f[t]))]),
    )
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// Days between successive contract volume peaks.
const CONTRACT_SPACING: usize = 40;

/// `date,contract,price,volume` with a `SPOT` row per day and overlapping
/// contracts whose volume peaks every [`CONTRACT_SPACING`] days. Contract
/// `k` trades at a small premium growing with `k`, so a raw splice shows a
/// jump at each roll.
pub fn contracts_csv(pair: &ReturnPair) -> Vec<u8> {
    let s = prices(100.0, &pair.spot);
    let f = prices(101.0, &pair.futures);
    let d = weekdays(s.len());
    let spacing = CONTRACT_SPACING as f64;
    let mut rows = Vec::new();
    for t in 0..s.len() {
        rows.push([d[t].to_string(), "SPOT".into(), num(round6(s[t])), "0".into()]);
        for k in 0..=(s.len() / CONTRACT_SPACING + 1) {
            let center = spacing * k as f64 + spacing / 2.0;
            let dist = (t as f64 - center).abs();
            if dist > 1.2 * spacing {
                continue;
            }
            let volume = (1000.0 * (1.0 - dist / (1.3 * spacing))).round().max(1.0) as u64;
            let price = f[t] * (1.0 + 0.004 * k as f64);
            rows.push([
                d[t].to_string(),
                format!("F{k:02}"),
                num(round6(price)),
                volume.to_string(),
            ]);
        }
    }
    csv_bytes(&["date", "contract", "price", "volume"], rows)
}
