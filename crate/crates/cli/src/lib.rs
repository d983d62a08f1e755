//! Command-line front end: parameter layering, CSV/JSON output and run manifests.

pub mod args;
pub mod commands;
pub mod error;
pub mod format;
pub mod manifest;
pub mod params;

pub use args::Cli;
pub use commands::run;
pub use error::CliError;
