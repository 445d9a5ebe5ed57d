//! Input parsing, cached stage files and atomic output staging.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use hedgekit_core::hedge::{HedgeRatioSeries, ModelHedges, ModelId};
use hedgekit_core::market_data::{
    align_prices, build_continuous, ContinuousSeries, ContractBar, ReturnPair, RolloverHandling,
};
use hedgekit_core::NaiveDate;
use sha2::{Digest, Sha256};

use crate::error::{Result, RunError};

pub const RETURNS_FILE: &str = "returns.csv";
pub const CONTINUOUS_FILE: &str = "continuous.csv";
pub const SUMMARY_FILE: &str = "summary_stats.csv";
pub const OHR_FILE: &str = "ohr_series.csv";
pub const PARAMS_FILE: &str = "params.csv";
pub const METRICS_FILE: &str = "metrics.csv";
pub const EFFECTIVENESS_FILE: &str = "effectiveness.csv";
pub const BEST_MODELS_FILE: &str = "best_models.csv";
pub const BOOTSTRAP_FILE: &str = "bootstrap.csv";
pub const REPORT_FILE: &str = "report.txt";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// `date,contract,price,volume`
    Contracts,
    /// `date,spot,futures`
    Aligned,
}

impl InputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            InputFormat::Contracts => "contracts",
            InputFormat::Aligned => "aligned",
        }
    }
}

/// Returns read from an input file, before any sample split.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub format: InputFormat,
    pub pair: ReturnPair,
    pub continuous: Option<ContinuousSeries>,
    /// Price dates dropped by the skip-boundary rule.
    pub skipped_returns: usize,
    pub rows: usize,
}

fn parse_date(s: &str, row: usize) -> anyhow::Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
        .with_context(|| format!("row {row}: bad ISO date {s:?}"))
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str, row: usize) -> anyhow::Result<T> {
    s.trim()
        .parse()
        .map_err(|_| anyhow!("row {row}: bad {what} {s:?}"))
}

fn header(rdr: &mut csv::Reader<impl Read>) -> anyhow::Result<Vec<String>> {
    Ok(rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_ascii_lowercase())
        .collect())
}

pub fn detect_format(columns: &[String]) -> Option<InputFormat> {
    match columns.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["date", "contract", "price", "volume"] => Some(InputFormat::Contracts),
        ["date", "spot", "futures"] => Some(InputFormat::Aligned),
        _ => None,
    }
}

/// Reads either input layout and turns prices into log returns.
pub fn read_input(path: &Path, spot_id: &str, handling: RolloverHandling) -> Result<Ingested> {
    let file = fs::File::open(path)
        .with_context(|| format!("cannot open input {}", path.display()))
        .map_err(RunError::io)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let cols = header(&mut rdr).map_err(RunError::data)?;
    let format = detect_format(&cols).ok_or_else(|| {
        RunError::data(anyhow!(
            "unrecognized header {cols:?}; expected date,contract,price,volume or date,spot,futures"
        ))
    })?;
    let records: Vec<csv::StringRecord> = rdr
        .records()
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("reading {}", path.display()))
        .map_err(RunError::data)?;
    let rows = records.len();
    let ingested = match format {
        InputFormat::Aligned => aligned(&records, handling),
        InputFormat::Contracts => contracts(&records, spot_id, handling),
    }
    .with_context(|| format!("input {}", path.display()))
    .map_err(RunError::data)?;
    Ok(Ingested { rows, ..ingested })
}

fn aligned(records: &[csv::StringRecord], handling: RolloverHandling) -> anyhow::Result<Ingested> {
    let mut dates = Vec::with_capacity(records.len());
    let mut spot = Vec::with_capacity(records.len());
    let mut fut = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        let row = i + 2;
        dates.push(parse_date(&r[0], row)?);
        spot.push(parse_num::<f64>(&r[1], "spot price", row)?);
        fut.push(parse_num::<f64>(&r[2], "futures price", row)?);
    }
    let flags = vec![false; dates.len()];
    let pair = ReturnPair::from_prices(&dates, &spot, &fut, &flags, handling)?;
    Ok(Ingested {
        format: InputFormat::Aligned,
        pair,
        continuous: None,
        skipped_returns: 0,
        rows: 0,
    })
}

fn contracts(
    records: &[csv::StringRecord],
    spot_id: &str,
    handling: RolloverHandling,
) -> anyhow::Result<Ingested> {
    let mut spot = Vec::new();
    let mut bars = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let row = i + 2;
        let date = parse_date(&r[0], row)?;
        let contract = r[1].trim();
        let price: f64 = parse_num(&r[2], "price", row)?;
        if contract.eq_ignore_ascii_case(spot_id) {
            spot.push((date, price));
            continue;
        }
        let volume: u64 = parse_num(&r[3], "volume", row)?;
        bars.push(ContractBar {
            date,
            contract: contract.to_string(),
            price,
            volume,
        });
    }
    if spot.is_empty() {
        bail!("no spot rows (contract id {spot_id:?})");
    }
    spot.sort_by_key(|(d, _)| *d);
    if let Some(w) = spot.windows(2).find(|w| w[0].0 == w[1].0) {
        bail!("duplicate spot price on {}", w[0].0);
    }
    let continuous = build_continuous(&bars)?;
    let (dates, s, f, flags) = align_prices(&spot, &continuous);
    let pair = ReturnPair::from_prices(&dates, &s, &f, &flags, handling)?;
    let skipped = dates.len().saturating_sub(1) - pair.len();
    Ok(Ingested {
        format: InputFormat::Contracts,
        pair,
        continuous: Some(continuous),
        skipped_returns: skipped,
        rows: 0,
    })
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(RunError::io)?;
    Ok(Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// Shortest text that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn csv_bytes<I, R>(header: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Output files collected in a temporary directory next to the target and
/// moved into place only when the whole stage succeeded.
pub struct Staging {
    dir: tempfile::TempDir,
    files: Vec<String>,
}

impl Staging {
    pub fn new(out: &Path) -> Result<Self> {
        let parent = match out.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent)
            .with_context(|| format!("cannot create {}", parent.display()))
            .map_err(RunError::io)?;
        let dir = tempfile::Builder::new()
            .prefix(".hedgekit-staging-")
            .tempdir_in(&parent)
            .context("cannot create staging directory")
            .map_err(RunError::io)?;
        Ok(Staging {
            dir,
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.dir.path().join(name), bytes)
            .with_context(|| format!("cannot stage {name}"))
            .map_err(RunError::io)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    /// Moves every staged file into `out`.
    pub fn commit(self, out: &Path) -> Result<Vec<String>> {
        fs::create_dir_all(out)
            .with_context(|| format!("cannot create {}", out.display()))
            .map_err(RunError::io)?;
        for name in &self.files {
            fs::rename(self.dir.path().join(name), out.join(name))
                .with_context(|| format!("cannot move {name} into {}", out.display()))
                .map_err(RunError::io)?;
        }
        Ok(self.files)
    }
}

fn open_cached(out: &Path, name: &str) -> Result<csv::Reader<fs::File>> {
    let path = out.join(name);
    let file = fs::File::open(&path).map_err(|_| {
        RunError::data(anyhow!(
            "missing upstream file {} (run the stage that produces {name} first)",
            path.display()
        ))
    })?;
    Ok(csv::Reader::from_reader(file))
}

/// Checks that every file in `names` exists under `out`.
pub fn require(out: &Path, names: &[&str]) -> Result<()> {
    let missing: Vec<&str> = names
        .iter()
        .copied()
        .filter(|n| !out.join(n).is_file())
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(RunError::data(anyhow!(
            "missing upstream files in {}: {}",
            out.display(),
            missing.join(", ")
        )))
    }
}

pub fn returns_csv(pair: &ReturnPair) -> Vec<u8> {
    csv_bytes(
        &["date", "spot", "futures", "sample"],
        (0..pair.len()).map(|t| {
            [
                pair.dates[t].to_string(),
                num(pair.spot[t]),
                num(pair.futures[t]),
                if t < pair.n_in { "in" } else { "out" }.to_string(),
            ]
        }),
    )
}

/// Reads `returns.csv` back into a split pair.
pub fn read_returns(out: &Path) -> Result<ReturnPair> {
    let mut rdr = open_cached(out, RETURNS_FILE)?;
    let (mut dates, mut spot, mut fut) = (Vec::new(), Vec::new(), Vec::new());
    let mut n_in = 0;
    let mut parse = |rdr: &mut csv::Reader<fs::File>| -> anyhow::Result<()> {
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = i + 2;
            dates.push(parse_date(&rec[0], row)?);
            spot.push(parse_num::<f64>(&rec[1], "spot return", row)?);
            fut.push(parse_num::<f64>(&rec[2], "futures return", row)?);
            match &rec[3] {
                "in" if n_in == i => n_in += 1,
                "out" => {}
                other => bail!("row {row}: bad sample tag {other:?}"),
            }
        }
        Ok(())
    };
    parse(&mut rdr)
        .context(RETURNS_FILE)
        .map_err(RunError::data)?;
    let n = spot.len();
    ReturnPair::new(dates, spot, fut)
        .and_then(|p| p.with_split(n_in, n - n_in))
        .context(RETURNS_FILE)
        .map_err(RunError::data)
}

pub fn continuous_csv(c: &ContinuousSeries) -> Vec<u8> {
    csv_bytes(
        &["date", "contract", "price", "rollover"],
        (0..c.dates.len()).map(|t| {
            [
                c.dates[t].to_string(),
                c.front[t].clone(),
                num(c.prices[t]),
                c.rollover[t].to_string(),
            ]
        }),
    )
}

pub fn ohr_csv(models: &[ModelHedges]) -> Vec<u8> {
    let rows = models.iter().flat_map(|m| {
        [&m.in_sample, &m.out_of_sample].into_iter().flat_map(|s| {
            s.dates
                .iter()
                .zip(&s.beta)
                .map(|(d, b)| [d.to_string(), s.model.as_str().to_string(), num(*b)])
        })
    });
    csv_bytes(&["date", "model", "beta"], rows)
}

/// Rebuilds per-model hedge ratios from `ohr_series.csv`, checking that they
/// cover exactly the dates of `pair`.
pub fn read_ohr(out: &Path, pair: &ReturnPair, models: &[ModelId]) -> Result<Vec<ModelHedges>> {
    let mut rdr = open_cached(out, OHR_FILE)?;
    let mut by_model: std::collections::BTreeMap<ModelId, Vec<(NaiveDate, f64)>> =
        Default::default();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.context(OHR_FILE).map_err(RunError::data)?;
        let date = parse_date(&rec[0], row).map_err(RunError::data)?;
        let model: ModelId = rec[1]
            .parse()
            .map_err(|e| RunError::data(anyhow!("{OHR_FILE} row {row}: {e}")))?;
        let beta = parse_num::<f64>(&rec[2], "beta", row).map_err(RunError::data)?;
        by_model.entry(model).or_default().push((date, beta));
    }
    let ins = pair.in_sample().dates;
    let outs = pair.out_of_sample().dates;
    models
        .iter()
        .map(|&model| {
            let rows = by_model.remove(&model).ok_or_else(|| {
                RunError::data(anyhow!("{OHR_FILE} has no rows for model {model}"))
            })?;
            let (dates, beta): (Vec<NaiveDate>, Vec<f64>) = rows.into_iter().unzip();
            if dates.len() != ins.len() + outs.len()
                || dates[..ins.len()] != *ins
                || dates[ins.len()..] != *outs
            {
                return Err(RunError::data(anyhow!(
                    "{OHR_FILE} dates for {model} do not match {RETURNS_FILE}"
                )));
            }
            let split = ins.len();
            Ok(ModelHedges {
                model,
                in_sample: HedgeRatioSeries {
                    model,
                    dates: ins.to_vec(),
                    beta: beta[..split].to_vec(),
                },
                out_of_sample: HedgeRatioSeries {
                    model,
                    dates: outs.to_vec(),
                    beta: beta[split..].to_vec(),
                },
            })
        })
        .collect()
}

/// Raw CSV rows of a cached output, header first.
pub fn read_table(out: &Path, name: &str) -> Result<Vec<Vec<String>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(
            fs::File::open(out.join(name))
                .with_context(|| format!("cannot open {name}"))
                .map_err(RunError::data)?,
        );
    rdr.records()
        .map(|r| r.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("reading {name}"))
        .map_err(RunError::data)
}
