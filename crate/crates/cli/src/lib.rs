//! Command-line front end for `kornlab`: configuration, dispatch and reports.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::dispatch;
pub use config::{parse_config, Command, Format, RunConfig, UsageError};
pub use report::Report;
