//! Path-conditioned dephasing in a Mach-Zehnder interferometer whose photon
//! polarization couples to its frequency inside a birefringent element.
//!
//! Times are expressed in the reduced variable `τ = 2πσΔn·t`; the dynamics
//! depend on the config only through `r = μ/σ`, the echo shift
//! `τ_s = 2πσΔx/c` and the interferometer phase `φ = 2πμΔx/c`.

pub mod config;
pub mod dephasing;
pub mod error;
pub mod fit;
pub mod grid;
pub mod metrology;
pub mod noise;
pub mod nonmarkovianity;
pub mod optimize;
pub mod qubit;

pub use config::{Path, PhysicalConfig, ReducedConfig, SPEED_OF_LIGHT};
pub use dephasing::{apply_dephasing, kappa, kappa_path, kappa_trajectory, path_probability, PathChannel};
pub use error::{Error, Result};
pub use fit::{fit_decoherence, fit_decoherence_with, FitOptions, FitResult};
pub use grid::{DecoherenceTrajectory, DistanceTrajectory, TimeGrid, Trajectory};
pub use noise::{ensemble, ensemble_serial, EnsembleResult, NoiseConfig};
pub use nonmarkovianity::{
    blp_channel, blp_from_samples, classify_pair, concurrence, trace_distance, BlpResult, Classification,
};
pub use qubit::QubitState;
