//! Command implementations, run reports and the benchmark harness behind the
//! `abcd` binary.

pub mod bench;
pub mod commands;
pub mod error;
pub mod report;

pub use error::CliError;
pub use report::RunReport;
