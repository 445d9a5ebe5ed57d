use alloc::boxed::Box;
use alloc::string::String;

use chrono::NaiveDate;

use crate::hedge::VechFit;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("duplicate bar for contract {contract} on {date}")]
    DuplicateBar { date: NaiveDate, contract: String },
    #[error("no volume data: every bar has zero volume")]
    NoVolumeData,
    #[error("non-positive or non-finite price {price} on {date}")]
    InvalidPrice { date: NaiveDate, price: f64 },
    #[error("non-positive or non-finite price {price} at index {index}")]
    InvalidPriceAt { index: usize, price: f64 },
    #[error("no forward contract is quoted on {date}; the front contract cannot roll back")]
    RolloverGap { date: NaiveDate },
    #[error("dates must be strictly increasing (index {index})")]
    UnorderedDates { index: usize },
    #[error("insufficient data for {what}: need {required}, have {available}")]
    TooShort {
        what: &'static str,
        required: usize,
        available: usize,
    },
    #[error("series length mismatch: expected {expected}, found {found}")]
    Misaligned { expected: usize, found: usize },
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("invalid GARCH parameters: {0}")]
    InvalidParams(&'static str),
    #[error("non-finite conditional moment at observation {index}")]
    NonFinite { index: usize },
    #[error("singular conditional covariance at observation {index}")]
    SingularCovariance { index: usize },
    #[error("baseline risk {value} is not positive; percentage reduction undefined")]
    NonPositiveBaseline { value: f64 },
    #[error("metric kinds differ between hedged and baseline values")]
    MetricMismatch,
    #[error("{failed} of {total} bootstrap replicates failed")]
    BootstrapFailures { failed: usize, total: usize },
    #[error(
        "GARCH fit did not converge after {} iterations (best neg-log-likelihood {})",
        .0.iterations, .0.neg_log_likelihood
    )]
    NonConvergence(Box<VechFit>),
}
