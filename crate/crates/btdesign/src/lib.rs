//! File formats, reports, parallel scans and the command-line interface
//! built on `btdesign-core`.

pub mod cli;
pub mod error;
pub mod io;
pub mod parallel;
pub mod report;

pub use error::{CliError, Result};
