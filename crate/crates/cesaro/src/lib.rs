//! Snapshot files, run configuration, reports, and the `cesaro` command line on top of
//! [`cesaro_core`].

pub mod cli;
pub mod config;
pub mod report;
pub mod snapshot;

pub use cli::run_cli;
