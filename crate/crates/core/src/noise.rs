//! Monte-Carlo noise model and ensemble spread of the BLP measure.
//!
//! Each grid point of the `|±⟩` trace-distance trajectory gets independent
//! traceless Hermitian noise `[[ε1, ε2 e^{iε3}], [ε2 e^{-iε3}, -ε1]]` on both
//! evolved states, with `ε1, ε2 ~ N(0, σ̃)` and `ε3 ~ U[0, 2π)`. Draws that
//! leave a state non-positive are rejected and redrawn. The noisy trajectory
//! is fitted with the model and the BLP measure of the fitted curve is the
//! perturbed non-Markovianity of that repetition.
//!
//! Randomness comes from ChaCha8 with the repetition index as stream id, so
//! repetition `k` sees the same numbers whatever order or thread runs it.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Path, PhysicalConfig};
use crate::dephasing::{apply_dephasing, PathChannel};
use crate::error::{Error, Result};
use crate::fit::fit_decoherence;
use crate::grid::{DistanceTrajectory, TimeGrid, Trajectory};
use crate::nonmarkovianity::{blp_from_samples, trace_distance};
use crate::qubit::QubitState;

pub const DEFAULT_REPETITIONS: usize = 100;
pub const DEFAULT_MAX_REDRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Full width of the noise distribution, `6 σ̃`.
    pub full_width: f64,
    pub repetitions: usize,
    pub seed: u64,
    pub grid: TimeGrid,
    pub max_redraws: usize,
}

impl NoiseConfig {
    pub fn new(full_width: f64, repetitions: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            full_width,
            repetitions,
            seed,
            grid: TimeGrid::default(),
            max_redraws: DEFAULT_MAX_REDRAWS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_grid(self, grid: TimeGrid) -> Self {
        Self { grid, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.full_width.is_finite() && self.full_width >= 0.0) {
            return Err(Error::invalid("noise_fw", format!("must be >= 0, got {}", self.full_width)));
        }
        if self.repetitions < 2 {
            return Err(Error::invalid("reps", format!("need at least 2 repetitions, got {}", self.repetitions)));
        }
        if self.max_redraws == 0 {
            return Err(Error::invalid("max_redraws", "must be >= 1"));
        }
        self.grid.validate()
    }

    /// Standard deviation `σ̃ = FW / 6`.
    pub fn sigma_tilde(&self) -> f64 {
        self.full_width / 6.0
    }
}

/// Generator for substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes `index` into `seed` (SplitMix64 finalizer) for per-task seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Adds random traceless Hermitian noise, redrawing until the state is physical.
pub fn perturb_state<R: Rng + ?Sized>(
    state: &QubitState,
    sigma_tilde: f64,
    max_redraws: usize,
    rng: &mut R,
) -> Result<QubitState> {
    if sigma_tilde == 0.0 {
        return Ok(*state);
    }
    let normal = Normal::new(0.0, sigma_tilde)
        .map_err(|e| Error::invalid("noise_fw", e.to_string()))?;
    for _ in 0..max_redraws {
        let e1 = normal.sample(rng);
        let e2 = normal.sample(rng);
        let e3 = rng.random::<f64>() * TAU;
        let candidate = state.shifted(e1, Complex64::from_polar(e2, e3));
        if candidate.is_physical() {
            return Ok(candidate);
        }
    }
    Err(Error::RedrawExhausted { attempts: max_redraws })
}

/// Trace distance of the independently perturbed, evolved `|±⟩` pair.
pub fn noisy_trace_distance_trajectory<R: Rng + ?Sized>(
    config: &PhysicalConfig,
    path: Path,
    noise: &NoiseConfig,
    rng: &mut R,
) -> Result<DistanceTrajectory> {
    let channel = PathChannel::new(config, path)?;
    let sigma_tilde = noise.sigma_tilde();
    let (plus, minus) = (QubitState::plus(), QubitState::minus());
    Trajectory::try_sample(noise.grid, |tau| {
        let k = channel.kappa(tau);
        let p = perturb_state(&apply_dephasing(&plus, k)?, sigma_tilde, noise.max_redraws, rng)?;
        let m = perturb_state(&apply_dephasing(&minus, k)?, sigma_tilde, noise.max_redraws, rng)?;
        Ok(trace_distance(&p, &m).clamp(0.0, 1.0))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub mean_measure: f64,
    /// Sample standard deviation (divisor n − 1) of the perturbed measures.
    pub std_measure: f64,
    /// Perturbed measures of successful repetitions, in repetition order.
    pub measures: Vec<f64>,
    /// Fitted path differences, m.
    pub fitted_delta_x_samples: Vec<f64>,
    pub failures: usize,
}

/// One repetition: noisy trajectory, fit, BLP measure of the fitted curve.
pub fn perturbed_measure(config: &PhysicalConfig, path: Path, noise: &NoiseConfig, repetition: u64) -> Result<(f64, f64)> {
    let mut rng = substream(noise.seed, repetition);
    let noisy = noisy_trace_distance_trajectory(config, path, noise, &mut rng)?;
    let fit = fit_decoherence(&noisy, config, path)?;
    let blp = blp_from_samples(&fit.model.values)?;
    Ok((blp.measure, fit.delta_x))
}

/// Runs `noise.repetitions` independent repetitions in parallel.
pub fn ensemble(config: &PhysicalConfig, path: Path, noise: &NoiseConfig) -> Result<EnsembleResult> {
    noise.validate()?;
    PathChannel::new(config, path)?;
    let runs: Vec<Result<(f64, f64)>> = (0..noise.repetitions as u64)
        .into_par_iter()
        .map(|rep| perturbed_measure(config, path, noise, rep))
        .collect();
    aggregate(runs, noise.repetitions)
}

/// Serial variant of [`ensemble`]; identical output.
pub fn ensemble_serial(config: &PhysicalConfig, path: Path, noise: &NoiseConfig) -> Result<EnsembleResult> {
    noise.validate()?;
    PathChannel::new(config, path)?;
    let runs = (0..noise.repetitions as u64)
        .map(|rep| perturbed_measure(config, path, noise, rep))
        .collect();
    aggregate(runs, noise.repetitions)
}

fn aggregate(runs: Vec<Result<(f64, f64)>>, repetitions: usize) -> Result<EnsembleResult> {
    let mut measures = Vec::with_capacity(runs.len());
    let mut fitted = Vec::with_capacity(runs.len());
    let mut failures = 0;
    for run in runs {
        match run {
            Ok((n, dx)) => {
                measures.push(n);
                fitted.push(dx);
            }
            Err(_) => failures += 1,
        }
    }
    if 2 * failures > repetitions || measures.len() < 2 {
        return Err(Error::EnsembleFailed { failures, repetitions });
    }
    let (mean, std) = mean_and_std(&measures);
    Ok(EnsembleResult { mean_measure: mean, std_measure: std, measures, fitted_delta_x_samples: fitted, failures })
}

/// Mean and sample standard deviation (n − 1), by Welford's recurrence.
///
/// Identical samples give exactly zero spread.
pub fn mean_and_std(xs: &[f64]) -> (f64, f64) {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &x) in xs.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    (mean, (m2 / (xs.len() - 1) as f64).sqrt())
}
