//! Futures hedge-ratio estimation and hedging-effectiveness evaluation.
//!
//! The crate is `no_std` (with `alloc`) so the numerical pieces can be
//! embedded anywhere; file formats, the CLI and parallel execution live in the
//! `hedgekit` companion crate.
//!
//! Layout:
//! - [`market_data`]: continuous futures by volume rollover, log returns,
//!   sample splitting.
//! - [`diagnostics`]: moments, Bera-Jarque, Engle's LM ARCH test, Dickey-Fuller.
//! - [`hedge`]: no-hedge / naive / rolling OLS ratios and the symmetric and
//!   asymmetric diagonal VECH GARCH models.
//! - [`risk`]: variance, lower partial moments, empirical VaR and CVaR.
//! - [`effectiveness`]: short/long hedged payoffs and HE scores.
//! - [`bootstrap`]: percentile intervals and paired difference tests.
#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod bootstrap;
pub mod diagnostics;
pub mod effectiveness;
mod error;
pub mod hedge;
mod linalg;
pub mod market_data;
pub mod optim;
pub mod risk;
mod special;

pub use chrono::NaiveDate;
pub use error::{Error, Result};
