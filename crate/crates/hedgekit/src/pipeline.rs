//! Stage functions shared by `run` and the individual subcommands.
//!
//! Parallel work goes through rayon with order-preserving collection, and
//! every bootstrap replicate derives its own generator from the master seed,
//! so results do not depend on the thread count.

use std::time::Instant;

use anyhow::{anyhow, Context};
use hedgekit_core::bootstrap::{
    replicate_difference, replicate_metric, summarize_difference, TestResult,
};
use hedgekit_core::diagnostics::{summary_stats, SummaryStats};
use hedgekit_core::effectiveness::{
    build_table, hedged_returns, BestModel, EffectivenessTable, HedgeSide, ModelHedges, Sample,
};
use hedgekit_core::hedge::{estimate_model, EstimatedModel};
use hedgekit_core::market_data::{ContinuousSeries, ReturnPair};
use hedgekit_core::risk::{MetricKind, MetricSpec};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{Result, RunError};
use crate::io::{self, Ingested, InputFormat, Staging};
use crate::manifest::{FitDiagnostics, InputRecord, RunManifest, StageTiming};
use crate::report;

/// Runs `f` on a pool with `threads` workers (0 = rayon's default).
pub fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| RunError::config(format!("cannot start {threads} worker threads: {e}")))?;
    Ok(pool.install(f))
}

/// Split returns plus where they came from.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub pair: ReturnPair,
    pub input: Option<InputRecord>,
    pub continuous: Option<ContinuousSeries>,
    pub available: usize,
}

/// Returns from `cfg.input`, or from a cached `returns.csv` when no input is
/// configured.
pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let Some(path) = &cfg.input else {
        let pair = io::read_returns(&cfg.out)?;
        if (pair.n_in, pair.n_out) != (cfg.n_in, cfg.n_out) {
            return Err(RunError::config(format!(
                "cached {} is split {}/{} but the configuration asks for {}/{}",
                io::RETURNS_FILE,
                pair.n_in,
                pair.n_out,
                cfg.n_in,
                cfg.n_out
            )));
        }
        let available = pair.len();
        return Ok(Prepared {
            pair,
            input: None,
            continuous: None,
            available,
        });
    };
    let Ingested {
        format,
        pair,
        continuous,
        skipped_returns,
        rows,
    } = io::read_input(path, &cfg.spot_id, cfg.rollover_handling)?;
    let available = pair.len();
    if cfg.n_in + cfg.n_out > available {
        return Err(RunError::config(format!(
            "n_in + n_out = {} exceeds the {available} returns available in {}",
            cfg.n_in + cfg.n_out,
            path.display()
        )));
    }
    let pair = pair
        .with_split(cfg.n_in, cfg.n_out)
        .map_err(|e| RunError::config(e.to_string()))?;
    let input = InputRecord {
        path: path.display().to_string(),
        sha256: io::sha256_file(path)?,
        format: format.as_str().into(),
        rows,
        returns_available: available,
        returns_skipped_at_rollover: skipped_returns,
        rollovers: continuous
            .as_ref()
            .map(|c| c.rollover.iter().filter(|r| **r).count())
            .unwrap_or(0),
    };
    debug_assert!(format == InputFormat::Contracts || continuous.is_none());
    Ok(Prepared {
        pair,
        input: Some(input),
        continuous,
        available,
    })
}

/// Descriptive statistics of the spot and futures returns used in the run.
pub fn stats(cfg: &RunConfig, pair: &ReturnPair) -> Result<Vec<(&'static str, SummaryStats)>> {
    [("spot", &pair.spot), ("futures", &pair.futures)]
        .into_iter()
        .map(|(name, x)| {
            summary_stats(x, cfg.lm_lags, cfg.adf_lags)
                .map(|s| (name, s))
                .with_context(|| format!("summary statistics for {name} returns"))
                .map_err(RunError::data)
        })
        .collect()
}

/// Hedge ratios for every configured model, estimated in parallel.
pub fn estimate(cfg: &RunConfig, pair: &ReturnPair) -> Result<Vec<EstimatedModel>> {
    let hc = cfg.hedge_config();
    cfg.models
        .par_iter()
        .map(|&m| {
            estimate_model(pair, m, &hc)
                .with_context(|| format!("model {m}"))
                .map_err(RunError::estimation)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    /// Bootstrap band of one metric (difference against zero).
    MetricCi,
    ShortVsLong,
    ModelVsBest,
}

impl Comparison {
    pub fn as_str(self) -> &'static str {
        match self {
            Comparison::MetricCi => "metric_ci",
            Comparison::ShortVsLong => "short_vs_long",
            Comparison::ModelVsBest => "model_vs_best",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapRow {
    pub comparison: Comparison,
    pub sample: Sample,
    pub side_or_pair: String,
    pub model: String,
    pub metric: MetricKind,
    pub result: TestResult,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub table: EffectivenessTable,
    pub best: Vec<BestModel>,
    pub bootstrap: Vec<BootstrapRow>,
}

struct Job<'a> {
    comparison: Comparison,
    sample: Sample,
    side_or_pair: String,
    model: String,
    metric: MetricSpec,
    a: &'a [f64],
    b: Option<&'a [f64]>,
}

/// Effectiveness table, best models and bootstrap tests.
pub fn evaluate(cfg: &RunConfig, pair: &ReturnPair, hedges: &[ModelHedges]) -> Result<Evaluation> {
    let metrics = cfg.metrics();
    let table = build_table(pair, hedges, &metrics)
        .context("effectiveness table")
        .map_err(RunError::estimation)?;
    let best = table.best_models();

    let mut sorted: Vec<&ModelHedges> = hedges.iter().collect();
    sorted.sort_by_key(|m| m.model);
    let mut payoffs = Vec::new();
    for sample in Sample::BOTH {
        if sample.view(pair).is_empty() {
            continue;
        }
        for side in HedgeSide::BOTH {
            for m in &sorted {
                let p = hedged_returns(sample.view(pair), m.get(sample), side)
                    .map_err(RunError::estimation)?;
                payoffs.push(((sample, side, m.model), p.returns));
            }
        }
    }
    let payoff = |sample, side, model| -> &[f64] {
        &payoffs
            .iter()
            .find(|(k, _)| *k == (sample, side, model))
            .expect("payoff computed")
            .1
    };
    let spec_of = |kind| *metrics.iter().find(|m| m.kind == kind).expect("metric configured");

    let mut jobs = Vec::new();
    for r in &table.rows {
        jobs.push(Job {
            comparison: Comparison::MetricCi,
            sample: r.sample,
            side_or_pair: r.side.as_str().into(),
            model: r.model.as_str().into(),
            metric: spec_of(r.metric),
            a: payoff(r.sample, r.side, r.model),
            b: None,
        });
    }
    for sample in Sample::BOTH {
        if sample.view(pair).is_empty() {
            continue;
        }
        for m in &sorted {
            for spec in &metrics {
                jobs.push(Job {
                    comparison: Comparison::ShortVsLong,
                    sample,
                    side_or_pair: "short-long".into(),
                    model: m.model.as_str().into(),
                    metric: *spec,
                    a: payoff(sample, HedgeSide::Short, m.model),
                    b: Some(payoff(sample, HedgeSide::Long, m.model)),
                });
            }
        }
    }
    for b in &best {
        for m in &sorted {
            if m.model == b.model {
                continue;
            }
            jobs.push(Job {
                comparison: Comparison::ModelVsBest,
                sample: b.sample,
                side_or_pair: b.side.as_str().into(),
                model: format!("{}-{}", m.model, b.model),
                metric: spec_of(b.metric),
                a: payoff(b.sample, b.side, m.model),
                b: Some(payoff(b.sample, b.side, b.model)),
            });
        }
    }

    let spec = cfg.bootstrap_spec();
    let bootstrap = jobs
        .par_iter()
        .map(|job| {
            let point = job.metric.evaluate(job.a).map(|v| v.value).and_then(|va| {
                Ok(match job.b {
                    Some(b) => va - job.metric.evaluate(b)?.value,
                    None => va,
                })
            });
            let values: Vec<Option<f64>> = (0..spec.replicates)
                .into_par_iter()
                .map(|rep| match job.b {
                    Some(b) => replicate_difference(job.a, b, &job.metric, &spec, rep),
                    None => replicate_metric(job.a, &job.metric, &spec, rep),
                })
                .collect();
            let result = point
                .and_then(|p| summarize_difference(p, &values, spec.level))
                .map_err(|e| {
                    RunError::estimation(anyhow!(
                        "bootstrap {} {} {} {} {}: {e}",
                        job.comparison.as_str(),
                        job.sample.as_str(),
                        job.side_or_pair,
                        job.model,
                        job.metric.kind
                    ))
                })?;
            Ok(BootstrapRow {
                comparison: job.comparison,
                sample: job.sample,
                side_or_pair: job.side_or_pair.clone(),
                model: job.model.clone(),
                metric: job.metric.kind,
                result,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Evaluation {
        table,
        best,
        bootstrap,
    })
}

fn fit_diagnostics(models: &[EstimatedModel]) -> Vec<FitDiagnostics> {
    models
        .iter()
        .flat_map(|m| {
            m.fits.iter().enumerate().map(|(i, f)| FitDiagnostics {
                model: m.hedges.model.as_str().into(),
                fit: i,
                nobs: f.nobs,
                converged: f.converged,
                iterations: f.iterations,
                evaluations: f.evaluations,
                neg_log_likelihood: f.neg_log_likelihood,
                initial_neg_log_likelihood: f.initial_neg_log_likelihood,
                clamped: f.clamped,
            })
        })
        .collect()
}

/// Which files a command produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Ingest,
    Stats,
    Fit,
    Evaluate,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Ingest => "ingest",
            Command::Stats => "stats",
            Command::Fit => "fit",
            Command::Evaluate => "evaluate",
        }
    }
}

struct Clock {
    start: Instant,
    stages: Vec<StageTiming>,
}

impl Clock {
    fn new() -> Self {
        Clock {
            start: Instant::now(),
            stages: Vec::new(),
        }
    }

    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.stages.push(StageTiming {
            stage: stage.into(),
            seconds: t.elapsed().as_secs_f64(),
        });
        out
    }
}

/// Executes a command end to end and moves its outputs into `cfg.out`.
///
/// Nothing is written to the output directory unless every step succeeds.
pub fn execute(cfg: &RunConfig, command: Command) -> Result<RunManifest> {
    cfg.validate()?;
    let mut clock = Clock::new();
    let prepared = clock.time("ingest", || prepare(cfg))?;
    let pair = &prepared.pair;
    let mut staging = Staging::new(&cfg.out)?;
    let mut manifest = RunManifest::new(cfg, command, &prepared);

    // fit needs the exact returns its ratios belong to for a later evaluate
    let saves_returns = match command {
        Command::Run | Command::Ingest => true,
        Command::Fit => prepared.input.is_some(),
        _ => false,
    };
    if saves_returns {
        staging.write(io::RETURNS_FILE, &io::returns_csv(pair))?;
        if let Some(c) = &prepared.continuous {
            staging.write(io::CONTINUOUS_FILE, &io::continuous_csv(c))?;
        }
    }
    if matches!(command, Command::Run | Command::Stats) {
        let s = clock.time("stats", || stats(cfg, pair))?;
        staging.write(io::SUMMARY_FILE, &report::summary_csv(&cfg.period, &s))?;
    }
    let hedges: Option<Vec<ModelHedges>> = match command {
        Command::Run | Command::Fit => {
            let models = clock.time("fit", || estimate(cfg, pair))?;
            staging.write(
                io::OHR_FILE,
                &io::ohr_csv(&models.iter().map(|m| m.hedges.clone()).collect::<Vec<_>>()),
            )?;
            staging.write(io::PARAMS_FILE, &report::params_csv(&models))?;
            manifest.fits = fit_diagnostics(&models);
            Some(models.into_iter().map(|m| m.hedges).collect())
        }
        Command::Evaluate => Some(io::read_ohr(&cfg.out, pair, &cfg.models)?),
        _ => None,
    };
    if matches!(command, Command::Run | Command::Evaluate) {
        let hedges = hedges.expect("hedge ratios available");
        let ev = clock.time("evaluate", || evaluate(cfg, pair, &hedges))?;
        let eff = report::effectiveness_csv(&ev.table);
        let best = report::best_csv(&ev.best);
        let boot = report::bootstrap_csv(&ev.bootstrap);
        staging.write(io::METRICS_FILE, &report::metrics_csv(&ev.table))?;
        staging.write(io::EFFECTIVENESS_FILE, &eff)?;
        staging.write(io::BEST_MODELS_FILE, &best)?;
        staging.write(io::BOOTSTRAP_FILE, &boot)?;
        let text = report::render(
            &report::rows_of(&eff),
            &report::rows_of(&best),
            &report::rows_of(&boot),
        )
        .map_err(|e| RunError::io(anyhow!(e)))?;
        staging.write(io::REPORT_FILE, text.as_bytes())?;
        manifest.effectiveness_rows = ev.table.rows.len();
        manifest.bootstrap_rows = ev.bootstrap.len();
    }

    manifest.outputs = staging.files().to_vec();
    manifest.outputs.push(io::MANIFEST_FILE.into());
    manifest.timing.stages = clock.stages;
    manifest.timing.total_seconds = clock.start.elapsed().as_secs_f64();
    let json = serde_json::to_vec_pretty(&manifest)
        .context("serializing manifest")
        .map_err(RunError::io)?;
    staging.write(io::MANIFEST_FILE, &json)?;
    staging.commit(&cfg.out)?;
    Ok(manifest)
}

/// Re-renders the text report from cached CSV outputs.
pub fn report(out: &std::path::Path) -> Result<String> {
    let needed = [io::EFFECTIVENESS_FILE, io::BEST_MODELS_FILE, io::BOOTSTRAP_FILE];
    io::require(out, &needed)?;
    let eff = io::read_table(out, io::EFFECTIVENESS_FILE)?;
    let best = io::read_table(out, io::BEST_MODELS_FILE)?;
    let boot = io::read_table(out, io::BOOTSTRAP_FILE)?;
    let text = report::render(&eff, &best, &boot).map_err(|e| RunError::data(anyhow!(e)))?;
    std::fs::write(out.join(io::REPORT_FILE), &text)
        .with_context(|| format!("writing {}", io::REPORT_FILE))
        .map_err(RunError::io)?;
    Ok(text)
}

