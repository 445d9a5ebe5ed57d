//! File formats, pipeline orchestration and the `hedgekit` command line on
//! top of [`hedgekit_core`].

pub mod config;
pub mod error;
pub mod io;
pub mod manifest;
pub mod pipeline;
pub mod report;
pub mod synth;

pub use config::RunConfig;
pub use error::{Result, RunError};
pub use pipeline::{execute, Command};
