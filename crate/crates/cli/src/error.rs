use std::fmt;

use oqi_core::Error;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_ENSEMBLE: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: EXIT_CONFIG, message: message.into() }
    }

    pub fn io(context: &str, err: std::io::Error) -> Self {
        Self { code: EXIT_FAILURE, message: format!("{context}: {err}") }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Maps core field names onto the flag that sets them.
fn flag_name(field: &str) -> &str {
    match field {
        "mu" => "mu_hz",
        "sigma" => "sigma_hz",
        "delta_x" => "delta_x_nm",
        "delta_x_max" => "delta_x_max_nm",
        "fd_step" => "fd_step_nm",
        other => other,
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::InvalidConfig { field, reason } => {
                Self::config(format!("invalid parameter `{}`: {reason}", flag_name(field)))
            }
            Error::DegeneratePath { .. } => Self { code: EXIT_DEGENERATE, message: err.to_string() },
            Error::EnsembleFailed { .. } => Self { code: EXIT_ENSEMBLE, message: err.to_string() },
            Error::GridUnderresolved { .. } => Self::config(err.to_string()),
            other => Self { code: EXIT_FAILURE, message: other.to_string() },
        }
    }
}
