//! Hedged portfolio payoffs and hedging-effectiveness scores.

use alloc::vec::Vec;

pub use crate::hedge::ModelHedges;
use crate::hedge::{HedgeRatioSeries, ModelId};
use crate::market_data::{PairView, ReturnPair};
use crate::risk::{MetricKind, MetricSpec, RiskValue};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HedgeSide {
    /// Long spot, short futures.
    Short,
    /// Short spot, long futures.
    Long,
}

impl HedgeSide {
    pub const BOTH: [HedgeSide; 2] = [HedgeSide::Short, HedgeSide::Long];

    pub fn as_str(self) -> &'static str {
        match self {
            HedgeSide::Short => "short",
            HedgeSide::Long => "long",
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            HedgeSide::Short => HedgeSide::Long,
            HedgeSide::Long => HedgeSide::Short,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sample {
    In,
    Out,
}

impl Sample {
    pub const BOTH: [Sample; 2] = [Sample::In, Sample::Out];

    pub fn as_str(self) -> &'static str {
        match self {
            Sample::In => "in",
            Sample::Out => "out",
        }
    }

    pub fn view(self, pair: &ReturnPair) -> PairView<'_> {
        match self {
            Sample::In => pair.in_sample(),
            Sample::Out => pair.out_of_sample(),
        }
    }
}

macro_rules! parse_labels {
    ($ty:ty, $($label:literal => $v:expr),+) => {
        impl core::str::FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim() {
                    $($label => Ok($v),)+
                    _ => Err(Error::InvalidArgument(concat!("unknown ", stringify!($ty)))),
                }
            }
        }
    };
}
parse_labels!(HedgeSide, "short" => HedgeSide::Short, "long" => HedgeSide::Long);
parse_labels!(Sample, "in" => Sample::In, "out" => Sample::Out);

#[derive(Debug, Clone, PartialEq)]
pub struct HedgedPortfolio {
    pub side: HedgeSide,
    pub model: ModelId,
    pub returns: Vec<f64>,
}

/// Short: `r_s - beta_t r_f`; long: the exact negation of the short payoff.
pub fn hedged_returns(
    pair: PairView<'_>,
    betas: &HedgeRatioSeries,
    side: HedgeSide,
) -> Result<HedgedPortfolio> {
    if betas.len() != pair.len() {
        return Err(Error::Misaligned {
            expected: pair.len(),
            found: betas.len(),
        });
    }
    if betas.dates.as_slice() != pair.dates {
        return Err(Error::InvalidArgument(
            "hedge ratio dates do not match return dates",
        ));
    }
    let returns = pair
        .spot
        .iter()
        .zip(pair.futures)
        .zip(&betas.beta)
        .map(|((s, f), b)| {
            let short = s - b * f;
            match side {
                HedgeSide::Short => short,
                HedgeSide::Long => -short,
            }
        })
        .collect();
    Ok(HedgedPortfolio {
        side,
        model: betas.model,
        returns,
    })
}

/// `1 - hedged / baseline`.
pub fn he_ratio(hedged: RiskValue, baseline: RiskValue) -> Result<f64> {
    if hedged.kind != baseline.kind {
        return Err(Error::MetricMismatch);
    }
    if !(baseline.value > 0.0) {
        return Err(Error::NonPositiveBaseline {
            value: baseline.value,
        });
    }
    Ok(1.0 - hedged.value / baseline.value)
}

/// The model with the largest risk; ties go to `NONE`, then to the earlier entry.
pub fn baseline_select(values: &[(ModelId, RiskValue)]) -> Result<ModelId> {
    if values.len() < 2 || !values.iter().any(|(m, _)| *m == ModelId::None) {
        return Err(Error::InvalidArgument(
            "baseline selection needs NONE and at least one other model",
        ));
    }
    let mut best = values[0];
    for &(m, v) in &values[1..] {
        if v.value > best.1.value || (v.value == best.1.value && m == ModelId::None) {
            best = (m, v);
        }
    }
    Ok(best.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectivenessRow {
    pub sample: Sample,
    pub side: HedgeSide,
    pub model: ModelId,
    pub metric: MetricKind,
    pub raw: f64,
    pub he: f64,
    pub baseline: ModelId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectivenessTable {
    /// Ordered by sample, side, model, metric.
    pub rows: Vec<EffectivenessRow>,
}

/// Lowest-risk model for one (sample, side, metric) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BestModel {
    pub sample: Sample,
    pub side: HedgeSide,
    pub metric: MetricKind,
    pub model: ModelId,
    pub raw: f64,
}

impl EffectivenessTable {
    pub fn cell(
        &self,
        sample: Sample,
        side: HedgeSide,
        metric: MetricKind,
    ) -> impl Iterator<Item = &EffectivenessRow> {
        self.rows
            .iter()
            .filter(move |r| r.sample == sample && r.side == side && r.metric == metric)
    }

    pub fn get(
        &self,
        sample: Sample,
        side: HedgeSide,
        model: ModelId,
        metric: MetricKind,
    ) -> Option<&EffectivenessRow> {
        self.cell(sample, side, metric).find(|r| r.model == model)
    }

    /// One entry per (sample, side, metric); ties keep the earlier model.
    pub fn best_models(&self) -> Vec<BestModel> {
        let mut out: Vec<BestModel> = Vec::new();
        for row in &self.rows {
            match out
                .iter_mut()
                .find(|b| b.sample == row.sample && b.side == row.side && b.metric == row.metric)
            {
                Some(b) if row.raw < b.raw => {
                    b.model = row.model;
                    b.raw = row.raw;
                }
                Some(_) => {}
                None => out.push(BestModel {
                    sample: row.sample,
                    side: row.side,
                    metric: row.metric,
                    model: row.model,
                    raw: row.raw,
                }),
            }
        }
        out.sort_by_key(|b| (b.sample, b.side, b.metric));
        out
    }
}

/// Hedged payoffs of every model for one sample and side.
pub fn portfolios(
    pair: &ReturnPair,
    models: &[ModelHedges],
    sample: Sample,
    side: HedgeSide,
) -> Result<Vec<HedgedPortfolio>> {
    models
        .iter()
        .map(|m| hedged_returns(sample.view(pair), m.get(sample), side))
        .collect()
}

/// Raw metrics and HE for every sample x side x model x metric; the
/// baseline is chosen per (sample, side, metric). Samples with no
/// observations are skipped.
pub fn build_table(
    pair: &ReturnPair,
    models: &[ModelHedges],
    metrics: &[MetricSpec],
) -> Result<EffectivenessTable> {
    let mut sorted: Vec<&ModelHedges> = models.iter().collect();
    sorted.sort_by_key(|m| m.model);
    let mut rows = Vec::new();
    for sample in Sample::BOTH {
        if sample.view(pair).is_empty() {
            continue;
        }
        for side in HedgeSide::BOTH {
            let payoffs: Vec<HedgedPortfolio> = sorted
                .iter()
                .map(|m| hedged_returns(sample.view(pair), m.get(sample), side))
                .collect::<Result<_>>()?;
            let mut cell_rows = Vec::new();
            for metric in metrics {
                let values: Vec<(ModelId, RiskValue)> = payoffs
                    .iter()
                    .map(|p| Ok((p.model, metric.evaluate(&p.returns)?)))
                    .collect::<Result<_>>()?;
                let baseline = baseline_select(&values)?;
                let base = values
                    .iter()
                    .find(|(m, _)| *m == baseline)
                    .expect("baseline present")
                    .1;
                for (model, value) in &values {
                    let he = if *model == baseline {
                        0.0
                    } else {
                        he_ratio(*value, base)?
                    };
                    cell_rows.push(EffectivenessRow {
                        sample,
                        side,
                        model: *model,
                        metric: metric.kind,
                        raw: value.value,
                        he,
                        baseline,
                    });
                }
            }
            cell_rows.sort_by_key(|r| (r.model, r.metric));
            rows.extend(cell_rows);
        }
    }
    Ok(EffectivenessTable { rows })
}
