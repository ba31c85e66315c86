//! Command-line front end for the two-sector infectious default model.

pub mod args;
pub mod commands;
pub mod error;
pub mod ingest;
pub mod reference;

pub use args::Cli;
pub use error::{CliError, CliResult};
