//! Quantum Fisher information of the frequency-path probe state and the
//! quantum Cramér-Rao bound.
//!
//! The probe is `(1/√2) ∫ g(f) (e^{i k f x_0}|f,0⟩ + e^{i k f x_1}|f,1⟩) df`
//! with `k = 2π/c`. For a pure state family `H = 4(⟨∂ψ|∂ψ⟩ − |⟨∂ψ|ψ⟩|²)`.
//! How Δx = x_0 − x_1 enters the arms is a convention:
//!
//! * single-arm, `x_0 = Δx`, `x_1 = 0`: `H = k²(2⟨f²⟩ − ⟨f⟩²)`,
//! * symmetric split, `x_0 = Δx/2`, `x_1 = −Δx/2`: `H = k²⟨f²⟩`.
//!
//! For the Gaussian spectrum `⟨f⟩ = μ`, `⟨f²⟩ = μ² + σ²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{PhysicalConfig, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// Relative change on grid doubling above which the oracle refuses to answer.
pub const GRID_CONVERGENCE_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QfiMode {
    #[default]
    SingleArm,
    Symmetric,
}

impl QfiMode {
    pub fn as_str(self) -> &'static str {
        match self {
            QfiMode::SingleArm => "single-arm",
            QfiMode::Symmetric => "symmetric",
        }
    }

    /// Arm lengths `(x_0, x_1)` realizing path difference `delta_x`.
    fn arms(self, delta_x: f64) -> (f64, f64) {
        match self {
            QfiMode::SingleArm => (delta_x, 0.0),
            QfiMode::Symmetric => (0.5 * delta_x, -0.5 * delta_x),
        }
    }
}

/// Power spectrum `|g(f)|²` of the photon.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum Spectrum {
    /// Gaussian with the config's μ and σ.
    #[default]
    Gaussian,
    /// Uniform over `μ ± width/2`, Hz.
    FlatTop { width: f64 },
}

impl Spectrum {
    fn density(&self, f: f64, config: &PhysicalConfig) -> f64 {
        match *self {
            Spectrum::Gaussian => {
                let z = (f - config.mu) / config.sigma;
                (-0.5 * z * z).exp()
            }
            Spectrum::FlatTop { width } => {
                if (f - config.mu).abs() <= 0.5 * width {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Discretization of the frequency integral: `points` bins over `μ ± half_span_sigmas·σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub points: usize,
    pub half_span_sigmas: f64,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self { points: 4096, half_span_sigmas: 8.0 }
    }
}

/// Closed-form QFI for the Gaussian spectrum, per m².
pub fn qfi_closed_form(config: &PhysicalConfig, mode: QfiMode) -> f64 {
    let k = 2.0 * PI / SPEED_OF_LIGHT;
    let (mu2, s2) = (config.mu * config.mu, config.sigma * config.sigma);
    match mode {
        QfiMode::SingleArm => k * k * (mu2 + 2.0 * s2),
        QfiMode::Symmetric => k * k * (mu2 + s2),
    }
}

/// `1 / sqrt(M H)`, m.
pub fn qcrb(h: f64, measurements: u64) -> f64 {
    1.0 / (measurements as f64 * h).sqrt()
}

/// Step for the Δx finite difference: phase change of `1e-4` rad at the top frequency.
pub fn default_qfi_fd_step(config: &PhysicalConfig, grid: &FrequencyGrid) -> f64 {
    let f_max = config.mu + grid.half_span_sigmas * config.sigma;
    1e-4 * SPEED_OF_LIGHT / (2.0 * PI * f_max)
}

/// Discretized probe state at path difference `delta_x`: path-0 block then path-1 block.
fn probe_state(config: &PhysicalConfig, mode: QfiMode, spectrum: &Spectrum, grid: &FrequencyGrid, delta_x: f64) -> Vec<Complex64> {
    let k = 2.0 * PI / SPEED_OF_LIGHT;
    let span = 2.0 * grid.half_span_sigmas * config.sigma;
    let df = span / grid.points as f64;
    let f0 = config.mu - 0.5 * span;
    let freqs: Vec<f64> = (0..grid.points).map(|i| f0 + (i as f64 + 0.5) * df).collect();
    let weights: Vec<f64> = freqs.iter().map(|&f| spectrum.density(f, config)).collect();
    let norm: f64 = weights.iter().sum();
    let (x0, x1) = mode.arms(delta_x);
    let amp = |w: f64| (0.5 * w / norm).sqrt();
    let arm = |x: f64| {
        freqs
            .iter()
            .zip(&weights)
            .map(move |(&f, &w)| Complex64::from_polar(amp(w), k * f * x))
    };
    arm(x0).chain(arm(x1)).collect()
}

/// Direct evaluation of `4(⟨∂ψ|∂ψ⟩ − |⟨∂ψ|ψ⟩|²)` on one frequency grid.
pub fn qfi_numeric(
    config: &PhysicalConfig,
    mode: QfiMode,
    spectrum: &Spectrum,
    grid: &FrequencyGrid,
    fd_step: f64,
) -> f64 {
    let psi = probe_state(config, mode, spectrum, grid, config.delta_x);
    let up = probe_state(config, mode, spectrum, grid, config.delta_x + fd_step);
    let down = probe_state(config, mode, spectrum, grid, config.delta_x - fd_step);
    let mut dd = 0.0;
    let mut dpsi_psi = Complex64::new(0.0, 0.0);
    for ((u, d), p) in up.iter().zip(&down).zip(&psi) {
        let dpsi = (u - d) / (2.0 * fd_step);
        dd += dpsi.norm_sqr();
        dpsi_psi += dpsi.conj() * p;
    }
    4.0 * (dd - dpsi_psi.norm_sqr())
}

/// Numerical QFI with a grid-convergence check against twice the resolution.
///
/// Returns the finer-grid value.
pub fn qfi_numeric_oracle(
    config: &PhysicalConfig,
    mode: QfiMode,
    spectrum: &Spectrum,
    grid: &FrequencyGrid,
) -> Result<f64> {
    if grid.points < 2 || grid.half_span_sigmas.is_nan() || grid.half_span_sigmas <= 0.0 {
        return Err(Error::invalid("f_grid", "need >= 2 points and a positive span"));
    }
    let h = default_qfi_fd_step(config, grid);
    let coarse = qfi_numeric(config, mode, spectrum, grid, h);
    let fine_grid = FrequencyGrid { points: 2 * grid.points, ..*grid };
    let fine = qfi_numeric(config, mode, spectrum, &fine_grid, h);
    let relative_change = ((fine - coarse) / fine).abs();
    if relative_change > GRID_CONVERGENCE_TOLERANCE {
        return Err(Error::GridUnderresolved { relative_change });
    }
    Ok(fine)
}
