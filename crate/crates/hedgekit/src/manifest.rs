//! `manifest.json`: configuration echo, input checksums, fit diagnostics and
//! timing for one invocation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::RunConfig;
use crate::pipeline::{Command, Prepared};

#[derive(Debug, Clone, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
    pub format: String,
    /// Data rows in the file, header excluded.
    pub rows: usize,
    pub returns_available: usize,
    pub returns_skipped_at_rollover: usize,
    pub rollovers: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitDiagnostics {
    pub model: String,
    pub fit: usize,
    pub nobs: usize,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
    pub neg_log_likelihood: f64,
    pub initial_neg_log_likelihood: f64,
    pub clamped: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleRecord {
    pub n_in: usize,
    pub n_out: usize,
    pub first_date: Option<String>,
    pub last_in_sample_date: Option<String>,
    pub last_date: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Grid {
    pub samples: Vec<&'static str>,
    pub sides: Vec<&'static str>,
    pub models: Vec<&'static str>,
    pub metrics: Vec<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RngRecord {
    pub generator: &'static str,
    pub replicate_seed: &'static str,
    pub unpaired_second_portfolio: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub stages: Vec<StageTiming>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: BTreeMap<&'static str, String>,
    pub input: Option<InputRecord>,
    pub sample: SampleRecord,
    pub grid: Grid,
    pub rng: RngRecord,
    pub fits: Vec<FitDiagnostics>,
    pub effectiveness_rows: usize,
    pub bootstrap_rows: usize,
    pub outputs: Vec<String>,
    /// The only field that changes between identical runs.
    pub timing: Timing,
}

impl RunManifest {
    pub fn new(cfg: &RunConfig, command: Command, prepared: &Prepared) -> Self {
        let pair = &prepared.pair;
        let date = |i: Option<usize>| i.and_then(|i| pair.dates.get(i)).map(|d| d.to_string());
        let samples = if pair.n_out > 0 {
            vec!["in", "out"]
        } else {
            vec!["in"]
        };
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.as_str(),
            config: cfg.echo(),
            input: prepared.input.clone(),
            sample: SampleRecord {
                n_in: pair.n_in,
                n_out: pair.n_out,
                first_date: date(Some(0)),
                last_in_sample_date: date(pair.n_in.checked_sub(1)),
                last_date: date(pair.len().checked_sub(1)),
            },
            grid: Grid {
                samples,
                sides: vec!["short", "long"],
                models: {
                    let mut m = cfg.models.clone();
                    m.sort();
                    m.iter().map(|m| m.as_str()).collect()
                },
                metrics: cfg.metrics().iter().map(|m| m.kind.as_str()).collect(),
            },
            rng: RngRecord {
                generator: "ChaCha8 (rand_chacha 0.9), indices via random_range(0..n)",
                replicate_seed: "splitmix64(seed ^ splitmix64(replicate))",
                unpaired_second_portfolio: "stream 1 of the replicate generator",
            },
            fits: Vec::new(),
            effectiveness_rows: 0,
            bootstrap_rows: 0,
            outputs: Vec::new(),
            timing: Timing::default(),
        }
    }
}
