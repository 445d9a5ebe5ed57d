use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hedgekit::config::SEED_ENV;
use hedgekit::{pipeline, synth, Command, RunConfig, RunError};

/// Backtest futures hedge ratios and compare their hedging effectiveness.
#[derive(Parser)]
#[command(name = "hedgekit", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full pipeline: ingest, stats, fit, evaluate, bootstrap, report.
    Run(RunArgs),
    /// Build the continuous series and aligned returns only.
    Ingest(RunArgs),
    /// Summary statistics and diagnostic tests.
    Stats(RunArgs),
    /// Estimate hedge ratios and write model parameters.
    Fit(RunArgs),
    /// Effectiveness tables and bootstrap tests from fitted ratios.
    Evaluate(RunArgs),
    /// Render report.txt from cached evaluation outputs.
    Report {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic price file from a simulated GARCH pair.
    Simulate(SimulateArgs),
}

/// Flags mirror the config file keys; values are validated by the config
/// loader so bad values exit with the configuration error code.
#[derive(Args, Default)]
struct RunArgs {
    /// key = value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_name = "N")]
    n_in: Option<String>,
    #[arg(long, value_name = "N")]
    n_out: Option<String>,
    #[arg(long, value_name = "N")]
    window: Option<String>,
    /// rolling or full
    #[arg(long)]
    ols_scheme: Option<String>,
    /// skip-boundary or keep
    #[arg(long)]
    rollover_handling: Option<String>,
    #[arg(long)]
    period: Option<String>,
    #[arg(long)]
    spot_id: Option<String>,
    #[arg(long, value_name = "K")]
    lpm_order: Option<String>,
    #[arg(long, value_name = "X")]
    lpm_target: Option<String>,
    #[arg(long, value_name = "P")]
    var_confidence: Option<String>,
    /// Bootstrap replicates.
    #[arg(long, value_name = "B")]
    bootstrap: Option<String>,
    /// Confidence level of bootstrap intervals.
    #[arg(long, value_name = "L")]
    level: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// true or false
    #[arg(long)]
    paired: Option<String>,
    /// Comma separated: none,naive,ols,sdvech,asdvech
    #[arg(long)]
    models: Option<String>,
    /// 0 uses every core.
    #[arg(long)]
    threads: Option<String>,
    /// own or joint
    #[arg(long)]
    indicator: Option<String>,
    #[arg(long, value_name = "N")]
    refit_every: Option<String>,
    #[arg(long, value_name = "N")]
    max_iter: Option<String>,
    #[arg(long, value_name = "N")]
    lm_lags: Option<String>,
    #[arg(long, value_name = "N")]
    adf_lags: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> Vec<(String, String)> {
        let flags = [
            ("input", &self.input),
            ("out", &self.out),
            ("n_in", &self.n_in),
            ("n_out", &self.n_out),
            ("window", &self.window),
            ("ols_scheme", &self.ols_scheme),
            ("rollover_handling", &self.rollover_handling),
            ("period", &self.period),
            ("spot_id", &self.spot_id),
            ("lpm_order", &self.lpm_order),
            ("lpm_target", &self.lpm_target),
            ("var_confidence", &self.var_confidence),
            ("bootstrap", &self.bootstrap),
            ("level", &self.level),
            ("seed", &self.seed),
            ("paired", &self.paired),
            ("models", &self.models),
            ("threads", &self.threads),
            ("indicator", &self.indicator),
            ("refit_every", &self.refit_every),
            ("max_iter", &self.max_iter),
            ("lm_lags", &self.lm_lags),
            ("adf_lags", &self.adf_lags),
        ];
        flags
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }

    fn load(&self) -> hedgekit::Result<RunConfig> {
        let env_seed = std::env::var(SEED_ENV).ok();
        RunConfig::load(self.config.as_deref(), &self.overrides(), env_seed.as_deref())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SimFormat {
    /// date,spot,futures
    Aligned,
    /// date,contract,price,volume with overlapping contracts
    Contracts,
}

#[derive(Args)]
struct SimulateArgs {
    /// Destination CSV.
    #[arg(long)]
    out: PathBuf,
    /// Number of simulated returns.
    #[arg(long, default_value_t = 260)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Negatively skewed, fat-tailed spot shocks.
    #[arg(long)]
    skewed: bool,
    #[arg(long, value_enum, default_value_t = SimFormat::Aligned)]
    format: SimFormat,
}

fn run_command(args: &RunArgs, command: Command) -> hedgekit::Result<()> {
    let cfg = args.load()?;
    let manifest = pipeline::in_pool(cfg.threads, || pipeline::execute(&cfg, command))??;
    println!(
        "{}: {} observations ({} in-sample, {} out-of-sample) -> {}",
        command.as_str(),
        manifest.sample.n_in + manifest.sample.n_out,
        manifest.sample.n_in,
        manifest.sample.n_out,
        cfg.out.display()
    );
    for f in &manifest.outputs {
        println!("  {f}");
    }
    Ok(())
}

fn report(config: Option<PathBuf>, out: Option<PathBuf>) -> hedgekit::Result<()> {
    let mut args = RunArgs {
        config,
        ..RunArgs::default()
    };
    args.out = out.map(|p| p.to_string_lossy().into_owned());
    let cfg = args.load()?;
    let text = pipeline::report(&cfg.out)?;
    print!("{text}");
    Ok(())
}

fn simulate(a: &SimulateArgs) -> hedgekit::Result<()> {
    let pair = synth::returns(a.n, a.seed, a.skewed)
        .context("simulation")
        .map_err(RunError::estimation)?;
    let bytes = match a.format {
        SimFormat::Aligned => synth::aligned_csv(&pair),
        SimFormat::Contracts => synth::contracts_csv(&pair),
    };
    std::fs::write(&a.out, bytes)
        .with_context(|| format!("cannot write {}", a.out.display()))
        .map_err(RunError::io)?;
    println!("wrote {} simulated returns to {}", a.n, a.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Run(a) => run_command(a, Command::Run),
        Cmd::Ingest(a) => run_command(a, Command::Ingest),
        Cmd::Stats(a) => run_command(a, Command::Stats),
        Cmd::Fit(a) => run_command(a, Command::Fit),
        Cmd::Evaluate(a) => run_command(a, Command::Evaluate),
        Cmd::Report { config, out } => report(config.clone(), out.clone()),
        Cmd::Simulate(a) => simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            e.exit_code()
        }
    }
}
