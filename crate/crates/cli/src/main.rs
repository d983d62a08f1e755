use std::process::ExitCode;

use clap::Parser;
use oqi_cli::{run, Cli, CliError};

/// Worker threads for sweeps and ensembles; unset means all cores.
const THREADS_ENV: &str = "OQI_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = match value.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return Err(CliError::config(format!("{THREADS_ENV} must be a positive integer, got `{value}`"))),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError { code: 1, message: e.to_string() })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(u8::try_from(err.code).unwrap_or(1))
        }
    }
}
