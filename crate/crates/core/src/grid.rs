use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid in reduced time `tau = 2π σ Δn t`.
///
/// Points are `tau_min + k * tau_step` for `k = 0..len()`, with the count
/// rounded so that `tau_max` is included when it lies on the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_step: f64,
}

impl Default for TimeGrid {
    /// `tau` in `[0, 5]` with step 0.01, 501 points.
    fn default() -> Self {
        Self { tau_min: 0.0, tau_max: 5.0, tau_step: 0.01 }
    }
}

impl TimeGrid {
    pub fn new(tau_min: f64, tau_max: f64, tau_step: f64) -> Result<Self> {
        let grid = Self { tau_min, tau_max, tau_step };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_step.is_finite() && self.tau_step > 0.0) {
            return Err(Error::invalid("tau_step", format!("must be > 0, got {}", self.tau_step)));
        }
        if !(self.tau_min.is_finite() && self.tau_max.is_finite()) {
            return Err(Error::invalid("tau_max", "grid bounds must be finite"));
        }
        if self.tau_min > self.tau_max {
            return Err(Error::invalid(
                "tau_max",
                format!("tau_max {} is below tau_min {}", self.tau_max, self.tau_min),
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        let span = (self.tau_max - self.tau_min) / self.tau_step;
        // absorb rounding in e.g. 5.0 / 0.01
        (span + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn tau(&self, k: usize) -> f64 {
        self.tau_min + k as f64 * self.tau_step
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.tau(k))
    }

    /// Last grid point actually sampled.
    pub fn last(&self) -> f64 {
        self.tau(self.len() - 1)
    }
}

/// Values sampled on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub grid: TimeGrid,
    pub values: Vec<T>,
}

/// Sampled decoherence function.
pub type DecoherenceTrajectory = Trajectory<Complex64>;
/// Sampled trace distances.
pub type DistanceTrajectory = Trajectory<f64>;

impl<T> Trajectory<T> {
    pub fn sample(grid: TimeGrid, f: impl FnMut(f64) -> T) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    pub fn try_sample<E>(grid: TimeGrid, f: impl FnMut(f64) -> std::result::Result<T, E>) -> std::result::Result<Self, E> {
        let values = grid.points().map(f).collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self { grid, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &T)> + '_ {
        self.grid.points().zip(self.values.iter())
    }
}

impl DecoherenceTrajectory {
    pub fn moduli(&self) -> DistanceTrajectory {
        Trajectory { grid: self.grid, values: self.values.iter().map(|k| k.norm()).collect() }
    }
}
