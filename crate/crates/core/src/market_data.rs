//! Continuous futures construction, log returns and sample splitting.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;

use crate::{Error, Result};

/// Smallest in-sample length accepted by [`ReturnPair::split_sample`].
pub const MIN_IN_SAMPLE: usize = 30;

/// One settlement record for one futures contract.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractBar {
    pub date: NaiveDate,
    pub contract: String,
    pub price: f64,
    pub volume: u64,
}

/// Rolled futures price path.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousSeries {
    pub dates: Vec<NaiveDate>,
    pub prices: Vec<f64>,
    pub front: Vec<String>,
    /// `true` on the first day a new front contract is used.
    pub rollover: Vec<bool>,
}

/// What to do with the return that spans a contract switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RolloverHandling {
    /// Drop the return spanning a switch (and the paired spot return).
    #[default]
    SkipBoundary,
    /// Keep the spliced price jump as an ordinary return.
    RawSplice,
}

impl RolloverHandling {
    pub fn as_str(self) -> &'static str {
        match self {
            RolloverHandling::SkipBoundary => "skip-boundary",
            RolloverHandling::RawSplice => "raw-splice",
        }
    }
}

impl core::str::FromStr for RolloverHandling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "skip-boundary" => Ok(RolloverHandling::SkipBoundary),
            "raw-splice" => Ok(RolloverHandling::RawSplice),
            _ => Err(Error::InvalidArgument(
                "rollover handling must be skip-boundary or raw-splice",
            )),
        }
    }
}

/// Builds the continuous front-month series by volume rollover.
///
/// Contracts are ordered by their last quoted date (a proxy for expiry), then
/// first quoted date, then label. The first day's front is the most traded
/// contract. Afterwards the front only moves forward: it switches to the next
/// quoted contract once that contract's volume exceeds the current front's,
/// or when the front stops being quoted.
pub fn build_continuous(bars: &[ContractBar]) -> Result<ContinuousSeries> {
    if bars.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut seen = BTreeSet::new();
    for bar in bars {
        if !(bar.price.is_finite() && bar.price > 0.0) {
            return Err(Error::InvalidPrice {
                date: bar.date,
                price: bar.price,
            });
        }
        if !seen.insert((bar.date, bar.contract.as_str())) {
            return Err(Error::DuplicateBar {
                date: bar.date,
                contract: bar.contract.clone(),
            });
        }
    }
    if bars.iter().all(|b| b.volume == 0) {
        return Err(Error::NoVolumeData);
    }

    // (last date, first date) per contract
    let mut span: BTreeMap<&str, (NaiveDate, NaiveDate)> = BTreeMap::new();
    for bar in bars {
        let e = span
            .entry(bar.contract.as_str())
            .or_insert((bar.date, bar.date));
        e.0 = e.0.max(bar.date);
        e.1 = e.1.min(bar.date);
    }
    let mut order: Vec<(&str, (NaiveDate, NaiveDate))> = span.into_iter().collect();
    order.sort_by(|a, b| (a.1 .0, a.1 .1, a.0).cmp(&(b.1 .0, b.1 .1, b.0)));
    let rank: BTreeMap<&str, usize> = order
        .iter()
        .enumerate()
        .map(|(i, (name, _))| (*name, i))
        .collect();

    // date -> [(rank, bar)] sorted by rank
    let mut by_date: BTreeMap<NaiveDate, Vec<(usize, &ContractBar)>> = BTreeMap::new();
    for bar in bars {
        by_date
            .entry(bar.date)
            .or_default()
            .push((rank[bar.contract.as_str()], bar));
    }

    let n = by_date.len();
    let mut out = ContinuousSeries {
        dates: Vec::with_capacity(n),
        prices: Vec::with_capacity(n),
        front: Vec::with_capacity(n),
        rollover: Vec::with_capacity(n),
    };
    let mut current: Option<usize> = None;
    for (date, mut quotes) in by_date {
        quotes.sort_by_key(|(r, _)| *r);
        let mut pos = match current {
            None => {
                let mut best = 0;
                for (i, (_, bar)) in quotes.iter().enumerate() {
                    if bar.volume > quotes[best].1.volume {
                        best = i;
                    }
                }
                best
            }
            Some(front) => match quotes.iter().position(|(r, _)| *r >= front) {
                Some(p) => p,
                None => return Err(Error::RolloverGap { date }),
            },
        };
        while pos + 1 < quotes.len() && quotes[pos + 1].1.volume > quotes[pos].1.volume {
            pos += 1;
        }
        let (r, bar) = quotes[pos];
        out.rollover
            .push(matches!(current, Some(prev) if prev != r));
        current = Some(r);
        out.dates.push(date);
        out.prices.push(bar.price);
        out.front.push(bar.contract.clone());
    }
    Ok(out)
}

/// `ln(p_t) - ln(p_{t-1})` for consecutive prices.
pub fn log_returns(prices: &[f64]) -> Result<Vec<f64>> {
    if prices.len() < 2 {
        return Err(Error::TooShort {
            what: "log returns",
            required: 2,
            available: prices.len(),
        });
    }
    if let Some((index, &price)) = prices
        .iter()
        .enumerate()
        .find(|(_, p)| !(p.is_finite() && **p > 0.0))
    {
        return Err(Error::InvalidPriceAt { index, price });
    }
    Ok(prices
        .windows(2)
        .map(|w| libm::log(w[1]) - libm::log(w[0]))
        .collect())
}

impl ContinuousSeries {
    /// Dated log returns; the date of a return is the date of its closing price.
    pub fn log_returns(&self, handling: RolloverHandling) -> Result<(Vec<NaiveDate>, Vec<f64>)> {
        let all = log_returns(&self.prices)?;
        Ok(all
            .into_iter()
            .enumerate()
            .filter(|(i, _)| handling == RolloverHandling::RawSplice || !self.rollover[i + 1])
            .map(|(i, r)| (self.dates[i + 1], r))
            .unzip())
    }
}

/// Joins a spot price series onto a continuous futures series.
///
/// Only dates present in both survive. A rollover that falls on a dropped
/// date is carried to the next surviving date so the spliced return is still
/// marked.
pub fn align_prices(
    spot: &[(NaiveDate, f64)],
    futures: &ContinuousSeries,
) -> (Vec<NaiveDate>, Vec<f64>, Vec<f64>, Vec<bool>) {
    let spot_by_date: BTreeMap<NaiveDate, f64> = spot.iter().copied().collect();
    let mut dates = Vec::new();
    let mut s = Vec::new();
    let mut f = Vec::new();
    let mut flags = Vec::new();
    let mut pending_roll = false;
    for i in 0..futures.dates.len() {
        pending_roll |= futures.rollover[i];
        if let Some(&p) = spot_by_date.get(&futures.dates[i]) {
            dates.push(futures.dates[i]);
            s.push(p);
            f.push(futures.prices[i]);
            flags.push(pending_roll);
            pending_roll = false;
        }
    }
    if let Some(first) = flags.first_mut() {
        *first = false;
    }
    (dates, s, f, flags)
}

/// Aligned spot/futures log returns with the in/out-of-sample split.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPair {
    pub dates: Vec<NaiveDate>,
    pub spot: Vec<f64>,
    pub futures: Vec<f64>,
    pub n_in: usize,
    pub n_out: usize,
}

/// Borrowed contiguous slice of a [`ReturnPair`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairView<'a> {
    pub dates: &'a [NaiveDate],
    pub spot: &'a [f64],
    pub futures: &'a [f64],
}

impl PairView<'_> {
    pub fn len(&self) -> usize {
        self.spot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spot.is_empty()
    }
}

impl ReturnPair {
    /// Whole series as in-sample (`n_in = len`, `n_out = 0`).
    pub fn new(dates: Vec<NaiveDate>, spot: Vec<f64>, futures: Vec<f64>) -> Result<Self> {
        for other in [futures.len(), dates.len()] {
            if other != spot.len() {
                return Err(Error::Misaligned {
                    expected: spot.len(),
                    found: other,
                });
            }
        }
        if let Some(i) = dates.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::UnorderedDates { index: i + 1 });
        }
        if spot.iter().chain(&futures).any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("non-finite return"));
        }
        let n = spot.len();
        Ok(ReturnPair {
            dates,
            spot,
            futures,
            n_in: n,
            n_out: 0,
        })
    }

    /// Returns from aligned price paths; `rollover[t]` marks that the futures
    /// price at `t` comes from a different contract than at `t - 1`.
    pub fn from_prices(
        dates: &[NaiveDate],
        spot: &[f64],
        futures: &[f64],
        rollover: &[bool],
        handling: RolloverHandling,
    ) -> Result<Self> {
        for len in [spot.len(), futures.len(), rollover.len()] {
            if len != dates.len() {
                return Err(Error::Misaligned {
                    expected: dates.len(),
                    found: len,
                });
            }
        }
        let rs = log_returns(spot)?;
        let rf = log_returns(futures)?;
        let keep = |t: &usize| handling == RolloverHandling::RawSplice || !rollover[t + 1];
        let idx: Vec<usize> = (0..rs.len()).filter(keep).collect();
        ReturnPair::new(
            idx.iter().map(|&t| dates[t + 1]).collect(),
            idx.iter().map(|&t| rs[t]).collect(),
            idx.iter().map(|&t| rf[t]).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.spot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spot.is_empty()
    }

    pub fn view(&self) -> PairView<'_> {
        self.range(0, self.len())
    }

    fn range(&self, start: usize, end: usize) -> PairView<'_> {
        PairView {
            dates: &self.dates[start..end],
            spot: &self.spot[start..end],
            futures: &self.futures[start..end],
        }
    }

    /// Contiguous prefix of `n_in` and the following `n_out` observations.
    pub fn split_sample(&self, n_in: usize, n_out: usize) -> Result<(PairView<'_>, PairView<'_>)> {
        check_split(self.len(), n_in, n_out)?;
        Ok((self.range(0, n_in), self.range(n_in, n_in + n_out)))
    }

    /// Truncates to `n_in + n_out` observations and records the split.
    pub fn with_split(mut self, n_in: usize, n_out: usize) -> Result<Self> {
        check_split(self.len(), n_in, n_out)?;
        let n = n_in + n_out;
        self.dates.truncate(n);
        self.spot.truncate(n);
        self.futures.truncate(n);
        self.n_in = n_in;
        self.n_out = n_out;
        Ok(self)
    }

    pub fn in_sample(&self) -> PairView<'_> {
        self.range(0, self.n_in)
    }

    pub fn out_of_sample(&self) -> PairView<'_> {
        self.range(self.n_in, self.n_in + self.n_out)
    }
}

fn check_split(len: usize, n_in: usize, n_out: usize) -> Result<()> {
    if n_in < MIN_IN_SAMPLE {
        return Err(Error::TooShort {
            what: "in-sample window",
            required: MIN_IN_SAMPLE,
            available: n_in,
        });
    }
    if n_in + n_out > len {
        return Err(Error::TooShort {
            what: "sample split",
            required: n_in + n_out,
            available: len,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn day(i: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2000, 1, 1 + i).unwrap()
    }

    fn bars(spec: &[(&str, &[u64])]) -> Vec<ContractBar> {
        let mut out = Vec::new();
        for (name, vols) in spec {
            for (i, v) in vols.iter().enumerate() {
                out.push(ContractBar {
                    date: day(i as u32),
                    contract: name.to_string(),
                    price: if *name == "A" {
                        100.0 + i as f64
                    } else {
                        200.0 + i as f64
                    },
                    volume: *v,
                });
            }
        }
        out
    }

    #[test]
    fn rolls_when_successor_volume_overtakes() {
        let s = build_continuous(&bars(&[("A", &[10, 10, 3]), ("B", &[1, 2, 5])])).unwrap();
        assert_eq!(s.front, vec!["A", "A", "B"]);
        assert_eq!(s.rollover, vec![false, false, true]);
        assert_eq!(s.prices, vec![100.0, 101.0, 202.0]);
    }

    #[test]
    fn single_contract_never_rolls() {
        let s = build_continuous(&bars(&[("A", &[5, 0, 100, 2])])).unwrap();
        assert!(s.rollover.iter().all(|f| !f));
        assert_eq!(s.front, vec!["A"; 4]);
    }

    #[test]
    fn front_never_rolls_back() {
        let s = build_continuous(&bars(&[("A", &[10, 2, 10]), ("B", &[1, 5, 1])])).unwrap();
        assert_eq!(s.front, vec!["A", "B", "B"]);
        assert_eq!(s.rollover, vec![false, true, false]);
    }

    #[test]
    fn forced_roll_when_front_stops_trading() {
        let mut b = bars(&[("A", &[10, 10]), ("B", &[1, 1, 1, 1])]);
        b.retain(|x| !(x.contract == "A" && x.date > day(1)));
        let s = build_continuous(&b).unwrap();
        assert_eq!(s.front, vec!["A", "A", "B", "B"]);
        assert_eq!(s.rollover, vec![false, false, true, false]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(build_continuous(&[]), Err(Error::EmptyInput));
        let mut dup = bars(&[("A", &[1, 2])]);
        dup.push(dup[0].clone());
        assert!(matches!(
            build_continuous(&dup),
            Err(Error::DuplicateBar { .. })
        ));
        assert_eq!(
            build_continuous(&bars(&[("A", &[0, 0]), ("B", &[0, 0])])),
            Err(Error::NoVolumeData)
        );
        let mut neg = bars(&[("A", &[1, 2])]);
        neg[1].price = 0.0;
        assert!(matches!(
            build_continuous(&neg),
            Err(Error::InvalidPrice { .. })
        ));
    }

    #[test]
    fn log_return_examples() {
        assert_eq!(log_returns(&[100.0, 100.0]).unwrap(), vec![0.0]);
        let r = log_returns(&[100.0, 110.0, 99.0]).unwrap();
        assert!((r[0] - 0.0953101798043249).abs() < 1e-12);
        assert!((r[1] + 0.1053605156578264).abs() < 1e-12);
        assert!(matches!(
            log_returns(&[100.0, -1.0]),
            Err(Error::InvalidPriceAt { index: 1, .. })
        ));
    }

    #[test]
    fn skip_boundary_omits_rollover_return() {
        let s = ContinuousSeries {
            dates: vec![day(0), day(1)],
            prices: vec![100.0, 105.0],
            front: vec!["A".into(), "B".into()],
            rollover: vec![false, true],
        };
        let (d, r) = s.log_returns(RolloverHandling::SkipBoundary).unwrap();
        assert!(d.is_empty() && r.is_empty());
        let (d, r) = s.log_returns(RolloverHandling::RawSplice).unwrap();
        assert_eq!(d, vec![day(1)]);
        assert!((r[0] - libm::log(1.05)).abs() < 1e-15);
    }

    #[test]
    fn paired_returns_drop_the_same_dates() {
        let dates: Vec<_> = (0..4).map(day).collect();
        let p = ReturnPair::from_prices(
            &dates,
            &[10.0, 11.0, 12.0, 13.0],
            &[20.0, 21.0, 30.0, 31.0],
            &[false, false, true, false],
            RolloverHandling::SkipBoundary,
        )
        .unwrap();
        assert_eq!(p.dates, vec![day(1), day(3)]);
        assert!((p.futures[1] - libm::log(31.0 / 30.0)).abs() < 1e-15);
        assert!((p.spot[1] - libm::log(13.0 / 12.0)).abs() < 1e-15);
    }

    #[test]
    fn alignment_carries_rollover_across_missing_spot_dates() {
        let fut = ContinuousSeries {
            dates: (0..4).map(day).collect(),
            prices: vec![1.0, 2.0, 3.0, 4.0],
            front: vec!["A".into(), "A".into(), "B".into(), "B".into()],
            rollover: vec![false, false, true, false],
        };
        let spot = [(day(0), 1.0), (day(1), 1.0), (day(3), 1.0)];
        let (d, _, f, flags) = align_prices(&spot, &fut);
        assert_eq!(d, vec![day(0), day(1), day(3)]);
        assert_eq!(f, vec![1.0, 2.0, 4.0]);
        assert_eq!(flags, vec![false, false, true]);
    }

    fn pair(n: usize) -> ReturnPair {
        let dates = (0..n)
            .map(|i| day(0) + chrono::Duration::days(i as i64))
            .collect();
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin() * 0.01).collect();
        ReturnPair::new(dates, x.clone(), x).unwrap()
    }

    #[test]
    fn split_examples() {
        let p = pair(260);
        let (a, b) = p.split_sample(160, 100).unwrap();
        assert_eq!((a.len(), b.len()), (160, 100));
        let (a, b) = p.split_sample(260, 0).unwrap();
        assert_eq!((a.len(), b.len()), (260, 0));
        assert_eq!(
            pair(100).split_sample(160, 0),
            Err(Error::TooShort {
                what: "sample split",
                required: 160,
                available: 100
            })
        );
    }

    #[test]
    fn split_views_concatenate_to_original() {
        let p = pair(200);
        let (a, b) = p.split_sample(120, 80).unwrap();
        let joined: Vec<f64> = a.spot.iter().chain(b.spot).copied().collect();
        assert_eq!(joined, p.spot);
        let joined: Vec<NaiveDate> = a.dates.iter().chain(b.dates).copied().collect();
        assert_eq!(joined, p.dates);
    }
}
