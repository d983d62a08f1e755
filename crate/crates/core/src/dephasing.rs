//! Closed-form dephasing dynamics behind the interferometer.
//!
//! The polarization only ever sees dephasing: populations stay fixed and the
//! coherence is multiplied by a decoherence function. Without post-selection
//! that function is the Gaussian `kappa`. Conditioning on exit path `j` mixes
//! in two copies shifted by the echo `±tau_s`, weighted by `(-1)^j`.

use num_complex::Complex64;

use crate::config::{Path, PhysicalConfig};
use crate::error::{Error, Result};
use crate::grid::{DecoherenceTrajectory, TimeGrid, Trajectory};
use crate::qubit::{QubitState, STATE_TOLERANCE};

/// Below this path probability the conditioned channel is undefined.
pub const DEGENERATE_PATH_THRESHOLD: f64 = 1e-12;

/// Slack allowed on `|kappa| <= 1`.
pub const KAPPA_MODULUS_SLACK: f64 = 1e-9;

/// Gaussian decoherence function `exp(i r tau - tau²/2)`.
pub fn kappa(tau: f64, r: f64) -> Complex64 {
    Complex64::from_polar((-0.5 * tau * tau).exp(), r * tau)
}

/// Probability of detecting the photon on exit `path`.
///
/// `P_1` is computed as `1 - P_0` so the pair sums to one exactly.
pub fn path_probability(config: &PhysicalConfig, path: Path) -> f64 {
    let red = config.reduce();
    let p0 = 0.5 * (1.0 + (-0.5 * red.tau_s * red.tau_s).exp() * red.phi.cos());
    match path {
        Path::Zero => p0,
        Path::One => 1.0 - p0,
    }
}

/// Path-conditioned decoherence function with its constants precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathChannel {
    pub path: Path,
    pub r: f64,
    pub tau_s: f64,
    pub probability: f64,
}

impl PathChannel {
    pub fn new(config: &PhysicalConfig, path: Path) -> Result<Self> {
        let red = config.reduce();
        let probability = path_probability(config, path);
        if probability < DEGENERATE_PATH_THRESHOLD {
            return Err(Error::DegeneratePath { path, probability });
        }
        Ok(Self { path, r: red.r, tau_s: red.tau_s, probability })
    }

    /// `[2κ(τ) + (-1)^j (κ(τ+τ_s) + κ(τ-τ_s))] / (4 P_j)`
    pub fn kappa(&self, tau: f64) -> Complex64 {
        let echo = kappa(tau + self.tau_s, self.r) + kappa(tau - self.tau_s, self.r);
        (2.0 * kappa(tau, self.r) + self.path.sign() * echo) / (4.0 * self.probability)
    }

    pub fn trajectory(&self, grid: &TimeGrid) -> DecoherenceTrajectory {
        Trajectory::sample(*grid, |tau| self.kappa(tau))
    }

    /// `|κ_j(τ)|`, the trace distance of the evolved `|±⟩` pair.
    pub fn distances(&self, grid: &TimeGrid) -> Trajectory<f64> {
        Trajectory::sample(*grid, |tau| self.kappa(tau).norm())
    }
}

/// `κ_j(τ)` for a single point. See [`PathChannel`] for repeated evaluation.
pub fn kappa_path(tau: f64, config: &PhysicalConfig, path: Path) -> Result<Complex64> {
    Ok(PathChannel::new(config, path)?.kappa(tau))
}

/// Unconditioned decoherence function sampled on `grid`.
pub fn kappa_trajectory(config: &PhysicalConfig, grid: &TimeGrid) -> DecoherenceTrajectory {
    let r = config.reduce().r;
    Trajectory::sample(*grid, |tau| kappa(tau, r))
}

/// Dephasing channel: keeps populations, multiplies `rho_HV` by `kappa_value`.
pub fn apply_dephasing(state: &QubitState, kappa_value: Complex64) -> Result<QubitState> {
    let out = state.with_coherence(state.rho_hv() * kappa_value);
    let min_eigenvalue = out.min_eigenvalue();
    if min_eigenvalue < -STATE_TOLERANCE {
        return Err(Error::NonPhysical { min_eigenvalue });
    }
    Ok(out)
}
