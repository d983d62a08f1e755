//! Experiment parameters and their dimensionless reduction.
//!
//! Dynamics are evaluated in the reduced time `tau = 2π σ Δn t`. In these
//! units the Gaussian decoherence function only depends on the phase ratio
//! `r = μ/σ`, and the interferometer delay `Δx/(c Δn)` becomes the echo shift
//! `tau_s = 2π σ Δx / c`. The birefringence cancels from every quantity
//! computed here; it is kept only to convert `tau` back to physical time.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Center wavelength of the reference setup, m.
pub const REFERENCE_WAVELENGTH: f64 = 780e-9;
/// Spectral standard deviation of the reference setup, Hz.
pub const REFERENCE_SIGMA_HZ: f64 = 5.68e11;
/// Quartz birefringence of the reference setup.
pub const REFERENCE_DELTA_N: f64 = 0.009;

/// Exit port of the second beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Path {
    Zero,
    One,
}

impl Path {
    pub const BOTH: [Path; 2] = [Path::Zero, Path::One];

    /// `(-1)^j`
    pub fn sign(self) -> f64 {
        match self {
            Path::Zero => 1.0,
            Path::One => -1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Path::Zero => 0,
            Path::One => 1,
        }
    }

    pub fn other(self) -> Path {
        match self {
            Path::Zero => Path::One,
            Path::One => Path::Zero,
        }
    }
}

impl TryFrom<u8> for Path {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            0 => Ok(Path::Zero),
            1 => Ok(Path::One),
            _ => Err(Error::invalid("path", format!("expected 0 or 1, got {value}"))),
        }
    }
}

impl From<Path> for u8 {
    fn from(path: Path) -> u8 {
        path.index() as u8
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Physical parameters of the interferometer, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    /// Center frequency, Hz.
    pub mu: f64,
    /// Spectral standard deviation, Hz.
    pub sigma: f64,
    /// Birefringence `n_H - n_V`.
    pub delta_n: f64,
    /// Path difference `x_0 - x_1`, m. Any sign.
    pub delta_x: f64,
}

impl PhysicalConfig {
    pub fn new(mu: f64, sigma: f64, delta_n: f64, delta_x: f64) -> Result<Self> {
        let config = Self { mu, sigma, delta_n, delta_x };
        config.validate()?;
        Ok(config)
    }

    /// The reference setup: 780 nm light, σ = 5.68e11 Hz, Δn = 0.009.
    pub fn reference(delta_x: f64) -> Self {
        Self {
            mu: SPEED_OF_LIGHT / REFERENCE_WAVELENGTH,
            sigma: REFERENCE_SIGMA_HZ,
            delta_n: REFERENCE_DELTA_N,
            delta_x,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::invalid("mu", format!("must be finite and > 0, got {}", self.mu)));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::invalid("sigma", format!("must be finite and > 0, got {}", self.sigma)));
        }
        if !self.delta_n.is_finite() || self.delta_n == 0.0 {
            return Err(Error::invalid("delta_n", format!("must be finite and nonzero, got {}", self.delta_n)));
        }
        if !self.delta_x.is_finite() {
            return Err(Error::invalid("delta_x", "must be finite"));
        }
        Ok(())
    }

    pub fn with_delta_x(&self, delta_x: f64) -> Self {
        Self { delta_x, ..*self }
    }

    pub fn speed_of_light(&self) -> f64 {
        SPEED_OF_LIGHT
    }

    /// Period of the path-probability fringes in Δx, `c/μ`.
    pub fn fringe_period(&self) -> f64 {
        SPEED_OF_LIGHT / self.mu
    }

    pub fn reduce(&self) -> ReducedConfig {
        ReducedConfig {
            r: self.mu / self.sigma,
            tau_s: 2.0 * PI * self.sigma * self.delta_x / SPEED_OF_LIGHT,
            phi: 2.0 * PI * self.mu * self.delta_x / SPEED_OF_LIGHT,
        }
    }

    /// Physical time corresponding to reduced time `tau`.
    pub fn time_from_tau(&self, tau: f64) -> f64 {
        tau / (2.0 * PI * self.sigma * self.delta_n)
    }

    pub fn tau_from_time(&self, t: f64) -> f64 {
        2.0 * PI * self.sigma * self.delta_n * t
    }
}

/// Dimensionless combinations the closed forms depend on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedConfig {
    /// Phase ratio `μ/σ`.
    pub r: f64,
    /// Echo shift `2π σ Δx / c`.
    pub tau_s: f64,
    /// Interferometric phase `2π μ Δx / c`, rad.
    pub phi: f64,
}
