//! CSV layouts of the result tables, plus a plain-text rendering built only
//! from those CSVs so `report` can run from cached files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use hedgekit_core::diagnostics::SummaryStats;
use hedgekit_core::effectiveness::{BestModel, EffectivenessTable};
use hedgekit_core::hedge::{EstimatedModel, VechFit};

use crate::io::{csv_bytes, num};
use crate::pipeline::BootstrapRow;

pub const SUMMARY_HEADER: [&str; 16] = [
    "series",
    "period",
    "n",
    "mean",
    "min",
    "max",
    "std_dev",
    "skewness",
    "excess_kurtosis",
    "bera_jarque",
    "bera_jarque_p",
    "lm_arch",
    "lm_arch_p",
    "adf",
    "adf_reject_5pct",
    "adf_reject_1pct",
];
pub const METRICS_HEADER: [&str; 5] = ["sample", "side", "model", "metric", "value"];
pub const EFFECTIVENESS_HEADER: [&str; 7] = [
    "sample",
    "side",
    "model",
    "metric",
    "raw",
    "baseline_model",
    "he_percent",
];
pub const BEST_HEADER: [&str; 5] = ["sample", "side", "metric", "model", "raw"];
pub const BOOTSTRAP_HEADER: [&str; 10] = [
    "comparison",
    "sample",
    "side_or_pair",
    "model",
    "metric",
    "point_diff",
    "t_stat",
    "ci_lo",
    "ci_hi",
    "significant",
];
pub const PARAMS_HEADER: [&str; 23] = [
    "model",
    "fit",
    "nobs",
    "converged",
    "iterations",
    "evaluations",
    "neg_log_likelihood",
    "initial_neg_log_likelihood",
    "clamped",
    "mu_s",
    "mu_f",
    "c_s",
    "c_f",
    "c_sf",
    "a_s",
    "a_f",
    "a_sf",
    "b_s",
    "b_f",
    "b_sf",
    "d_s",
    "d_f",
    "indicator",
];

const NA: &str = "NA";

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| NA.into())
}

/// HE as a percentage with two decimals.
pub fn he_percent(he: f64) -> String {
    let p = 100.0 * he;
    // avoid "-0.00"
    if p.abs() < 0.005 {
        "0.00".into()
    } else {
        format!("{p:.2}")
    }
}

pub fn summary_csv(period: &str, rows: &[(&str, SummaryStats)]) -> Vec<u8> {
    csv_bytes(
        &SUMMARY_HEADER,
        rows.iter().map(|(name, s)| {
            vec![
                name.to_string(),
                period.to_string(),
                s.n.to_string(),
                num(s.mean),
                num(s.min),
                num(s.max),
                num(s.std_dev),
                opt(s.skewness),
                opt(s.excess_kurtosis),
                opt(s.bera_jarque.map(|t| t.statistic)),
                opt(s.bera_jarque.map(|t| t.p_value)),
                opt(s.lm_arch.map(|t| t.statistic)),
                opt(s.lm_arch.map(|t| t.p_value)),
                opt(s.adf.map(|t| t.statistic)),
                s.adf.map(|t| t.reject_5pct().to_string()).unwrap_or(NA.into()),
                s.adf.map(|t| t.reject_1pct().to_string()).unwrap_or(NA.into()),
            ]
        }),
    )
}

fn fit_row(model: &str, index: usize, f: &VechFit) -> Vec<String> {
    let p = &f.params;
    let (ds, df) = if f.spec.asymmetric {
        (num(p.asymmetry.spot), num(p.asymmetry.futures))
    } else {
        (num(0.0), num(0.0))
    };
    vec![
        model.to_string(),
        index.to_string(),
        f.nobs.to_string(),
        f.converged.to_string(),
        f.iterations.to_string(),
        f.evaluations.to_string(),
        num(f.neg_log_likelihood),
        num(f.initial_neg_log_likelihood),
        f.clamped.to_string(),
        num(p.mean.spot),
        num(p.mean.futures),
        num(p.intercept.spot),
        num(p.intercept.futures),
        num(p.intercept.cross),
        num(p.arch.spot),
        num(p.arch.futures),
        num(p.arch.cross),
        num(p.garch.spot),
        num(p.garch.futures),
        num(p.garch.cross),
        ds,
        df,
        if f.spec.asymmetric {
            f.spec.indicator.as_str().to_string()
        } else {
            NA.into()
        },
    ]
}

pub fn params_csv(models: &[EstimatedModel]) -> Vec<u8> {
    csv_bytes(
        &PARAMS_HEADER,
        models.iter().flat_map(|m| {
            m.fits
                .iter()
                .enumerate()
                .map(|(i, f)| fit_row(m.hedges.model.as_str(), i, f))
        }),
    )
}

pub fn metrics_csv(table: &EffectivenessTable) -> Vec<u8> {
    csv_bytes(
        &METRICS_HEADER,
        table.rows.iter().map(|r| {
            [
                r.sample.as_str().to_string(),
                r.side.as_str().to_string(),
                r.model.as_str().to_string(),
                r.metric.as_str().to_string(),
                num(r.raw),
            ]
        }),
    )
}

pub fn effectiveness_csv(table: &EffectivenessTable) -> Vec<u8> {
    csv_bytes(
        &EFFECTIVENESS_HEADER,
        table.rows.iter().map(|r| {
            [
                r.sample.as_str().to_string(),
                r.side.as_str().to_string(),
                r.model.as_str().to_string(),
                r.metric.as_str().to_string(),
                num(r.raw),
                r.baseline.as_str().to_string(),
                he_percent(r.he),
            ]
        }),
    )
}

pub fn best_csv(best: &[BestModel]) -> Vec<u8> {
    csv_bytes(
        &BEST_HEADER,
        best.iter().map(|b| {
            [
                b.sample.as_str().to_string(),
                b.side.as_str().to_string(),
                b.metric.as_str().to_string(),
                b.model.as_str().to_string(),
                num(b.raw),
            ]
        }),
    )
}

pub fn bootstrap_csv(rows: &[BootstrapRow]) -> Vec<u8> {
    csv_bytes(
        &BOOTSTRAP_HEADER,
        rows.iter().map(|r| {
            [
                r.comparison.as_str().to_string(),
                r.sample.as_str().to_string(),
                r.side_or_pair.clone(),
                r.model.clone(),
                r.metric.as_str().to_string(),
                num(r.result.point_diff),
                num(r.result.t_stat),
                num(r.result.ci.lo),
                num(r.result.ci.hi),
                r.result.significant.to_string(),
            ]
        }),
    )
}

/// Parses CSV bytes into header-first string rows.
pub fn rows_of(bytes: &[u8]) -> Vec<Vec<String>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(bytes)
        .records()
        .map(|r| r.expect("generated CSV").iter().map(str::to_string).collect())
        .collect()
}

type PanelCell = (String, String, String, String, String);

fn column(header: &[String], name: &str) -> Result<usize, String> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| format!("column {name} missing"))
}

/// Text tables: raw metric and HE per model for each sample and side, the
/// best model per cell, and the significant bootstrap comparisons.
pub fn render(
    effectiveness: &[Vec<String>],
    best: &[Vec<String>],
    bootstrap: &[Vec<String>],
) -> Result<String, String> {
    let mut out = String::new();
    let (eh, erows) = effectiveness.split_first().ok_or("effectiveness.csv is empty")?;
    let [c_sample, c_side, c_model, c_metric, c_raw, c_base, c_he] =
        EFFECTIVENESS_HEADER.map(|n| column(eh, n));
    let (c_sample, c_side, c_model, c_metric, c_raw, c_base, c_he) =
        (c_sample?, c_side?, c_model?, c_metric?, c_raw?, c_base?, c_he?);

    // (sample, side) -> rows of (model, metric, raw, he, baseline)
    let mut panels: BTreeMap<(String, String), Vec<PanelCell>> = BTreeMap::new();
    let mut panel_order = Vec::new();
    for r in erows {
        let key = (r[c_sample].clone(), r[c_side].clone());
        if !panels.contains_key(&key) {
            panel_order.push(key.clone());
        }
        panels.entry(key).or_default().push((
            r[c_model].clone(),
            r[c_metric].clone(),
            r[c_raw].clone(),
            r[c_he].clone(),
            r[c_base].clone(),
        ));
    }
    for key in &panel_order {
        let rows = &panels[key];
        let mut metrics: Vec<&str> = Vec::new();
        let mut models: Vec<&str> = Vec::new();
        for (m, k, ..) in rows {
            if !models.contains(&m.as_str()) {
                models.push(m);
            }
            if !metrics.contains(&k.as_str()) {
                metrics.push(k);
            }
        }
        let _ = writeln!(out, "== {}-sample, {} hedger ==", key.0, key.1);
        let _ = write!(out, "{:<9}", "model");
        for k in &metrics {
            let _ = write!(out, " {:>14} {:>8}", format!("{k} raw"), "HE%");
        }
        out.push('\n');
        for m in &models {
            let _ = write!(out, "{m:<9}");
            for k in &metrics {
                match rows.iter().find(|r| r.0 == *m && r.1 == *k) {
                    Some((_, _, raw, he, _)) => {
                        let raw = raw.parse::<f64>().map(|v| format!("{v:.6e}")).unwrap_or(raw.clone());
                        let _ = write!(out, " {raw:>14} {he:>8}");
                    }
                    None => {
                        let _ = write!(out, " {:>14} {:>8}", "-", "-");
                    }
                }
            }
            out.push('\n');
        }
        let _ = write!(out, "{:<9}", "baseline");
        for k in &metrics {
            let b = rows.iter().find(|r| r.1 == *k).map(|r| r.4.as_str()).unwrap_or("-");
            let _ = write!(out, " {b:>23}");
        }
        out.push_str("\n\n");
    }

    if let Some((bh, brows)) = best.split_first() {
        let cs = [
            column(bh, "sample")?,
            column(bh, "side")?,
            column(bh, "metric")?,
            column(bh, "model")?,
        ];
        out.push_str("== best model per cell ==\n");
        for r in brows {
            let _ = writeln!(out, "{:<4} {:<6} {:<9} {}", r[cs[0]], r[cs[1]], r[cs[2]], r[cs[3]]);
        }
        out.push('\n');
    }

    if let Some((th, trows)) = bootstrap.split_first() {
        let cs = BOOTSTRAP_HEADER.map(|n| column(th, n));
        let [c0, c1, c2, c3, c4, c5, c6, c7, c8, c9] = cs;
        let (c0, c1, c2, c3, c4, c5, c6, c7, c8, c9) =
            (c0?, c1?, c2?, c3?, c4?, c5?, c6?, c7?, c8?, c9?);
        let tests: Vec<&Vec<String>> = trows.iter().filter(|r| r[c0] != "metric_ci").collect();
        let sig: Vec<&&Vec<String>> = tests.iter().filter(|r| r[c9] == "true").collect();
        let _ = writeln!(
            out,
            "== bootstrap differences: {} of {} significant ==",
            sig.len(),
            tests.len()
        );
        for r in sig {
            let _ = writeln!(
                out,
                "{:<13} {:<4} {:<14} {:<16} {:<9} diff {:>12} t {:>8} ci [{}, {}]",
                r[c0],
                r[c1],
                r[c2],
                r[c3],
                r[c4],
                sci(&r[c5]),
                r[c6].parse::<f64>().map(|v| format!("{v:.2}")).unwrap_or(r[c6].clone()),
                sci(&r[c7]),
                sci(&r[c8]),
            );
        }
    }
    Ok(out)
}

fn sci(cell: &str) -> String {
    cell.parse::<f64>()
        .map(|v| format!("{v:.4e}"))
        .unwrap_or_else(|_| cell.to_string())
}
