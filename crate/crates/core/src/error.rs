use thiserror::Error;

use crate::config::Path;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("exit path {path} is degenerate (P = {probability:e})")]
    DegeneratePath { path: Path, probability: f64 },

    #[error("state is not physical (min eigenvalue {min_eigenvalue:e})")]
    NonPhysical { min_eigenvalue: f64 },

    #[error("trajectory needs at least two samples, got {len}")]
    EmptyTrajectory { len: usize },

    #[error("no physical perturbation found after {attempts} draws")]
    RedrawExhausted { attempts: usize },

    #[error("fit optimum {delta_x:e} m lies on the search bracket boundary")]
    FitDiverged { delta_x: f64 },

    #[error("frequency grid under-resolved: doubling changed QFI by {relative_change:e}")]
    GridUnderresolved { relative_change: f64 },

    #[error("ensemble failed: {failures} of {repetitions} repetitions aborted")]
    EnsembleFailed { failures: usize, repetitions: usize },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig { field, reason: reason.into() }
    }
}
