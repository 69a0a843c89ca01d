//! IO, file formats, parallel batch evaluation and the pipeline stages
//! behind the `lexifuse` command line tool.

pub mod config;
pub mod error;
pub mod formats;
pub mod parallel;
pub mod pipeline;

pub use error::{CliError, CliResult};

pub const TOOL_VERSION: &str = concat!("lexifuse ", env!("CARGO_PKG_VERSION"));
