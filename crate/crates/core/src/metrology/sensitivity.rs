//! Detectability of small path-difference changes.
//!
//! The sensitivity of an observable is its spread divided by the slope of its
//! mean with respect to Δx. A vanishing slope is reported as `f64::INFINITY`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::config::{Path, PhysicalConfig, SPEED_OF_LIGHT};
use crate::dephasing::path_probability;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::noise::{ensemble, EnsembleResult, NoiseConfig};
use crate::nonmarkovianity::blp_channel;

/// Default finite-difference step for `∂N/∂Δx`, m.
pub const DEFAULT_FD_STEP: f64 = 0.1e-9;

/// `|∂N/∂Δx|` below this (per meter) counts as vanishing.
pub const BLP_DERIVATIVE_FLOOR: f64 = 1e-18;

/// `|∂P/∂Δx|` below this fraction of the steepest possible fringe slope
/// `π μ / c` counts as vanishing.
pub const PROBABILITY_DERIVATIVE_FLOOR: f64 = 1e-10;

/// Analytic `∂P_j/∂Δx`, per meter.
pub fn path_probability_derivative(config: &PhysicalConfig, path: Path) -> f64 {
    let red = config.reduce();
    let ds = 2.0 * PI * config.sigma / SPEED_OF_LIGHT;
    let dphi = 2.0 * PI * config.mu / SPEED_OF_LIGHT;
    let envelope = (-0.5 * red.tau_s * red.tau_s).exp();
    let dp0 = -0.5 * envelope * (red.tau_s * ds * red.phi.cos() + dphi * red.phi.sin());
    path.sign() * dp0
}

/// `sqrt(P(1−P)) / |∂P/∂Δx|` for the single-shot exit-port observable, m.
pub fn sensitivity_probability(config: &PhysicalConfig, path: Path) -> f64 {
    let p = path_probability(config, path);
    let slope = path_probability_derivative(config, path).abs();
    let scale = PI * config.mu / SPEED_OF_LIGHT;
    if slope <= PROBABILITY_DERIVATIVE_FLOOR * scale {
        return f64::INFINITY;
    }
    (p * (1.0 - p)).max(0.0).sqrt() / slope
}

/// Central difference of the noiseless BLP measure in Δx, per meter.
pub fn derivative_blp(config: &PhysicalConfig, path: Path, grid: &TimeGrid, fd_step: f64) -> Result<f64> {
    if !(fd_step.is_finite() && fd_step > 0.0) {
        return Err(Error::invalid("fd_step", format!("must be > 0, got {fd_step}")));
    }
    let up = blp_channel(&config.with_delta_x(config.delta_x + fd_step), path, grid)?.measure;
    let down = blp_channel(&config.with_delta_x(config.delta_x - fd_step), path, grid)?.measure;
    Ok((up - down) / (2.0 * fd_step))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlpSensitivity {
    /// `ΔN / |∂N/∂Δx|`, m; infinite when the derivative vanishes.
    pub sensitivity: f64,
    /// `ΔN`, the ensemble standard deviation.
    pub delta_n_std: f64,
    /// `∂N/∂Δx`, per meter.
    pub derivative: f64,
    pub ensemble: EnsembleResult,
}

pub fn sensitivity_blp(
    config: &PhysicalConfig,
    path: Path,
    grid: &TimeGrid,
    noise: &NoiseConfig,
    fd_step: f64,
) -> Result<BlpSensitivity> {
    let derivative = derivative_blp(config, path, grid, fd_step)?;
    let noise = noise.with_grid(*grid);
    let ensemble = ensemble(config, path, &noise)?;
    let delta_n_std = ensemble.std_measure;
    let sensitivity = if derivative.abs() < BLP_DERIVATIVE_FLOOR {
        f64::INFINITY
    } else {
        delta_n_std / derivative.abs()
    };
    Ok(BlpSensitivity { sensitivity, delta_n_std, derivative, ensemble })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_derivative_matches_finite_difference() {
        for dx in [1.3e-6, 5071e-9, 1.0493e-4, -4.4e-5] {
            let cfg = PhysicalConfig::reference(dx);
            for path in Path::BOTH {
                let h = 1e-13;
                let fd = (path_probability(&cfg.with_delta_x(dx + h), path)
                    - path_probability(&cfg.with_delta_x(dx - h), path))
                    / (2.0 * h);
                let an = path_probability_derivative(&cfg, path);
                assert!((fd - an).abs() < 1e-4 * an.abs().max(1e3), "dx={dx}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn infinite_at_zero_path_difference() {
        let cfg = PhysicalConfig::reference(0.0);
        assert_eq!(sensitivity_probability(&cfg, Path::Zero), f64::INFINITY);
        assert_eq!(sensitivity_probability(&cfg, Path::One), f64::INFINITY);
    }

    #[test]
    fn infinite_at_exact_extremum() {
        // bisect the analytic slope of P_0 around its minimum near 5070 nm
        let slope = |x: f64| path_probability_derivative(&PhysicalConfig::reference(x), Path::Zero);
        let (mut a, mut b) = (5060e-9, 5080e-9);
        assert!(slope(a) < 0.0 && slope(b) > 0.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if slope(m) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        let cfg = PhysicalConfig::reference(a);
        assert_eq!(sensitivity_probability(&cfg, Path::Zero), f64::INFINITY);
    }

    #[test]
    fn finite_between_extrema() {
        let cfg = PhysicalConfig::reference(5070e-9 + 195e-9);
        let s = sensitivity_probability(&cfg, Path::Zero);
        assert!(s.is_finite() && s > 0.0);
    }

    #[test]
    fn derivative_vanishes_where_measure_is_flat() {
        let cfg = PhysicalConfig::reference(4900e-9);
        let d = derivative_blp(&cfg, Path::Zero, &TimeGrid::default(), DEFAULT_FD_STEP).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn derivative_at_symmetric_apex_is_small() {
        // N_0 peaks at the P_0 minimum 5070 nm; slopes on the flanks are huge
        let grid = TimeGrid::default();
        let apex = derivative_blp(&PhysicalConfig::reference(5070e-9), Path::Zero, &grid, DEFAULT_FD_STEP).unwrap();
        let flank = derivative_blp(&PhysicalConfig::reference(5069.6e-9), Path::Zero, &grid, DEFAULT_FD_STEP).unwrap();
        assert!(flank.abs() > 1e8, "{flank}");
        assert!(apex.abs() < 0.05 * flank.abs(), "{apex} vs {flank}");
    }

    #[test]
    fn zero_noise_blp_sensitivity_is_zero() {
        let cfg = PhysicalConfig::reference(1.0488e-4);
        let noise = NoiseConfig::new(0.0, 3, 1).unwrap();
        let s = sensitivity_blp(&cfg, Path::Zero, &TimeGrid::default(), &noise, DEFAULT_FD_STEP).unwrap();
        assert!(s.derivative.abs() > BLP_DERIVATIVE_FLOOR);
        assert_eq!(s.sensitivity, 0.0);
    }
}
