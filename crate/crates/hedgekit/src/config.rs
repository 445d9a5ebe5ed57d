//! Run configuration: a flat `key = value` file, overridden by CLI flags.
//!
//! ```text
//! # comments and blank lines are ignored
//! input = data/cl.csv
//! n_in = 160
//! models = none,naive,ols,sdvech,asdvech
//! ```
//!
//! Keys match the long flag names with `-` replaced by `_`. The seed falls back
//! to `HEDGEKIT_SEED` when neither the file nor a flag sets it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hedgekit_core::bootstrap::{BootstrapSpec, DEFAULT_LEVEL, DEFAULT_REPLICATES};
use hedgekit_core::hedge::{
    FitOptions, HedgeConfig, IndicatorRule, ModelId, OlsScheme, MIN_FIT_LEN, MIN_OLS_WINDOW,
};
use hedgekit_core::market_data::{RolloverHandling, MIN_IN_SAMPLE};
use hedgekit_core::risk::{tail_count, MetricSpec};

use crate::error::{Result, RunError};

pub const SEED_ENV: &str = "HEDGEKIT_SEED";
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    /// Free-text period tag copied into outputs.
    pub period: String,
    pub rollover_handling: RolloverHandling,
    /// Contract id of spot rows in raw contract files.
    pub spot_id: String,
    pub n_in: usize,
    pub n_out: usize,
    pub window: usize,
    pub ols_scheme: OlsScheme,
    pub lpm_order: f64,
    pub lpm_target: f64,
    pub var_confidence: f64,
    pub bootstrap: usize,
    pub level: f64,
    pub seed: u64,
    pub paired: bool,
    pub models: Vec<ModelId>,
    /// Worker threads; 0 lets the runtime decide.
    pub threads: usize,
    pub indicator: IndicatorRule,
    pub refit_every: Option<usize>,
    pub max_iter: usize,
    pub lm_lags: usize,
    pub adf_lags: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            out: PathBuf::from("hedgekit-out"),
            period: String::new(),
            rollover_handling: RolloverHandling::SkipBoundary,
            spot_id: "SPOT".into(),
            n_in: 160,
            n_out: 100,
            window: 60,
            ols_scheme: OlsScheme::Rolling,
            lpm_order: 3.0,
            lpm_target: 0.0,
            var_confidence: 0.99,
            bootstrap: DEFAULT_REPLICATES,
            level: DEFAULT_LEVEL,
            seed: DEFAULT_SEED,
            paired: true,
            models: ModelId::ALL.to_vec(),
            threads: 0,
            indicator: IndicatorRule::Own,
            refit_every: None,
            max_iter: FitOptions::default().max_iter,
            lm_lags: 5,
            adf_lags: 0,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| RunError::config(format!("cannot parse {key} = {value:?}")))
}

fn parse_core<T: FromStr<Err = hedgekit_core::Error>>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|e| RunError::config(format!("{key}: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(RunError::config(format!("{key} must be true or false, got {value:?}"))),
    }
}

pub fn parse_models(value: &str) -> Result<Vec<ModelId>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_core::<ModelId>("models", s))
        .collect()
}

impl RunConfig {
    /// Sets one key from its text form. `seed` is handled separately by
    /// [`RunConfig::load`] so the fallback order stays in one place.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        match key.as_str() {
            "input" => {
                let v = value.trim();
                self.input = (!v.is_empty()).then(|| PathBuf::from(v));
            }
            "out" => self.out = PathBuf::from(value.trim()),
            "period" => self.period = value.trim().to_string(),
            "rollover_handling" => self.rollover_handling = parse_core(&key, value)?,
            "spot_id" => self.spot_id = value.trim().to_string(),
            "n_in" => self.n_in = parse(&key, value)?,
            "n_out" => self.n_out = parse(&key, value)?,
            "window" => self.window = parse(&key, value)?,
            "ols_scheme" => self.ols_scheme = parse_core(&key, value)?,
            "lpm_order" => self.lpm_order = parse(&key, value)?,
            "lpm_target" => self.lpm_target = parse(&key, value)?,
            "var_confidence" => self.var_confidence = parse(&key, value)?,
            "bootstrap" => self.bootstrap = parse(&key, value)?,
            "level" => self.level = parse(&key, value)?,
            "seed" => self.seed = parse(&key, value)?,
            "paired" => self.paired = parse_bool(&key, value)?,
            "models" => self.models = parse_models(value)?,
            "threads" => self.threads = parse(&key, value)?,
            "indicator" => self.indicator = parse_core(&key, value)?,
            "refit_every" => {
                let v = value.trim();
                self.refit_every = match v {
                    "" | "none" | "0" => None,
                    _ => Some(parse(&key, v)?),
                };
            }
            "max_iter" => self.max_iter = parse(&key, value)?,
            "lm_lags" => self.lm_lags = parse(&key, value)?,
            "adf_lags" => self.adf_lags = parse(&key, value)?,
            _ => return Err(RunError::config(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines.
    pub fn parse_file_text(text: &str) -> Result<Vec<(String, String)>> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                RunError::config(format!("line {}: expected key = value", i + 1))
            })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(pairs)
    }

    /// Defaults, then the file, then `overrides` (flag order). The seed
    /// comes from the last of flag, file, `env_seed`, default.
    pub fn load(
        file: Option<&Path>,
        overrides: &[(String, String)],
        env_seed: Option<&str>,
    ) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let mut seed_set = false;
        let mut pairs = Vec::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| {
                RunError::config(format!("cannot read config {}: {e}", path.display()))
            })?;
            pairs = Self::parse_file_text(&text)?;
            // relative paths in a config file are relative to the file
            let base = path.parent().unwrap_or(Path::new(""));
            for (k, v) in pairs.iter_mut() {
                let key = k.replace('-', "_");
                if (key == "input" || key == "out") && !v.is_empty() && Path::new(v.as_str()).is_relative() {
                    *v = base.join(v.as_str()).to_string_lossy().into_owned();
                }
            }
        }
        pairs.extend(overrides.iter().cloned());
        for (k, v) in &pairs {
            seed_set |= k.replace('-', "_") == "seed";
            cfg.set(k, v)?;
        }
        if !seed_set {
            if let Some(s) = env_seed.filter(|s| !s.trim().is_empty()) {
                cfg.seed = s
                    .trim()
                    .parse()
                    .map_err(|_| RunError::config(format!("{SEED_ENV} is not a u64: {s:?}")))?;
            }
        }
        Ok(cfg)
    }

    /// Checks everything that does not depend on the data.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(RunError::Config(msg));
        if self.models.is_empty() {
            return fail("no models selected".into());
        }
        let mut seen = self.models.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.models.len() {
            return fail("duplicate model in list".into());
        }
        if !self.models.contains(&ModelId::None) {
            return fail("model list must include none (the effectiveness baseline)".into());
        }
        if self.n_in < MIN_IN_SAMPLE {
            return fail(format!("n_in = {} is below the minimum of {MIN_IN_SAMPLE}", self.n_in));
        }
        let garch = self
            .models
            .iter()
            .any(|m| matches!(m, ModelId::Sdvech | ModelId::Asdvech));
        if garch && self.n_in < MIN_FIT_LEN {
            return fail(format!(
                "GARCH models need n_in >= {MIN_FIT_LEN}, got {}",
                self.n_in
            ));
        }
        if self.models.contains(&ModelId::Ols) {
            if self.window < MIN_OLS_WINDOW {
                return fail(format!("window must be at least {MIN_OLS_WINDOW}"));
            }
            if self.window > self.n_in {
                return fail(format!(
                    "window = {} exceeds n_in = {}",
                    self.window, self.n_in
                ));
            }
        }
        for spec in self.metrics() {
            spec.validate()
                .map_err(|e| RunError::config(format!("metric settings: {e}")))?;
        }
        for (name, n) in [("n_in", self.n_in), ("n_out", self.n_out)] {
            if n > 0 {
                tail_count(n, self.var_confidence).map_err(|e| {
                    RunError::config(format!("{name} too short for var_confidence: {e}"))
                })?;
            }
        }
        self.bootstrap_spec()
            .validate()
            .map_err(|e| RunError::config(format!("bootstrap settings: {e}")))?;
        if self.refit_every == Some(0) {
            return fail("refit_every must be positive".into());
        }
        if self.max_iter == 0 {
            return fail("max_iter must be positive".into());
        }
        if self.lm_lags == 0 {
            return fail("lm_lags must be positive".into());
        }
        Ok(())
    }

    pub fn metrics(&self) -> [MetricSpec; 4] {
        MetricSpec::standard_set(self.lpm_order, self.lpm_target, self.var_confidence)
    }

    pub fn bootstrap_spec(&self) -> BootstrapSpec {
        BootstrapSpec {
            replicates: self.bootstrap,
            level: self.level,
            seed: self.seed,
            paired: self.paired,
        }
    }

    pub fn hedge_config(&self) -> HedgeConfig {
        HedgeConfig {
            ols_window: self.window,
            ols_scheme: self.ols_scheme,
            fit: FitOptions {
                max_iter: self.max_iter,
                ..FitOptions::default()
            },
            indicator: self.indicator,
            refit_every: self.refit_every,
        }
    }

    /// Every setting in its config-file form.
    pub fn echo(&self) -> BTreeMap<&'static str, String> {
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        };
        BTreeMap::from([
            ("input", path(&self.input)),
            ("out", self.out.display().to_string()),
            ("period", self.period.clone()),
            ("rollover_handling", self.rollover_handling.as_str().into()),
            ("spot_id", self.spot_id.clone()),
            ("n_in", self.n_in.to_string()),
            ("n_out", self.n_out.to_string()),
            ("window", self.window.to_string()),
            ("ols_scheme", self.ols_scheme.as_str().into()),
            ("lpm_order", self.lpm_order.to_string()),
            ("lpm_target", self.lpm_target.to_string()),
            ("var_confidence", self.var_confidence.to_string()),
            ("bootstrap", self.bootstrap.to_string()),
            ("level", self.level.to_string()),
            ("seed", self.seed.to_string()),
            ("paired", self.paired.to_string()),
            (
                "models",
                self.models
                    .iter()
                    .map(|m| m.as_str())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("threads", self.threads.to_string()),
            ("indicator", self.indicator.as_str().into()),
            (
                "refit_every",
                self.refit_every.map(|k| k.to_string()).unwrap_or("none".into()),
            ),
            ("max_iter", self.max_iter.to_string()),
            ("lm_lags", self.lm_lags.to_string()),
            ("adf_lags", self.adf_lags.to_string()),
        ])
    }
}
