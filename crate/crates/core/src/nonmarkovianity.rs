//! Trace distance, the BLP measure and environment concurrence.
//!
//! For dephasing channels the pair `|±⟩` maximizes trace-distance revivals,
//! and their distance at time `τ` is simply `|κ(τ)|`. The BLP measure of a
//! channel therefore reduces to the positive variation of `|κ_j|` on the grid.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::{Path, PhysicalConfig};
use crate::dephasing::PathChannel;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::qubit::{hermitian_eigenvalues, QubitState};

/// Positive variation above which a noiseless trajectory counts as non-Markovian.
pub const BLP_THRESHOLD: f64 = 1e-9;

/// Differences with `|trace|` below this use the traceless closed form.
const TRACELESS_EPS: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Markovian,
    NonMarkovian,
    /// The channel does not exist (vanishing path probability).
    Undefined,
}

impl Classification {
    pub fn from_measure(measure: f64) -> Self {
        if measure > BLP_THRESHOLD {
            Classification::NonMarkovian
        } else {
            Classification::Markovian
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Markovian => "markovian",
            Classification::NonMarkovian => "non_markovian",
            Classification::Undefined => "undefined",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlpResult {
    /// Total increase of trace distance.
    pub measure: f64,
    /// Number of maximal runs of consecutive increases.
    pub revival_count: usize,
    pub classification: Classification,
    /// Set when the grid ends before the echo at `|tau_s|`.
    pub grid_too_short: bool,
}

/// `½ tr|ρ1 − ρ2|`
pub fn trace_distance(rho1: &QubitState, rho2: &QubitState) -> f64 {
    let a = rho1.rho_hh() - rho2.rho_hh();
    let d = rho1.rho_vv() - rho2.rho_vv();
    let b = rho1.rho_hv() - rho2.rho_hv();
    if (a + d).abs() < TRACELESS_EPS {
        // eigenvalues ±sqrt(a² + |b|²)
        return (0.5 * (a - d)).hypot(b.norm());
    }
    let (lo, hi) = hermitian_eigenvalues(a, d, b);
    0.5 * (lo.abs() + hi.abs())
}

/// Positive variation of sampled trace distances.
pub fn blp_from_samples(distances: &[f64]) -> Result<BlpResult> {
    if distances.len() < 2 {
        return Err(Error::EmptyTrajectory { len: distances.len() });
    }
    let mut measure = 0.0;
    let mut revival_count = 0;
    let mut rising = false;
    for w in distances.windows(2) {
        let inc = w[1] - w[0];
        if inc > 0.0 {
            measure += inc;
            if !rising {
                revival_count += 1;
            }
            rising = true;
        } else {
            rising = false;
        }
    }
    Ok(BlpResult {
        measure,
        revival_count,
        classification: Classification::from_measure(measure),
        grid_too_short: false,
    })
}

/// BLP measure of the channel conditioned on `path`, using the `|±⟩` pair.
pub fn blp_channel(config: &PhysicalConfig, path: Path, grid: &TimeGrid) -> Result<BlpResult> {
    let channel = PathChannel::new(config, path)?;
    let mut result = blp_from_samples(&channel.distances(grid).values)?;
    result.grid_too_short = grid.last() < channel.tau_s.abs();
    Ok(result)
}

/// Markovianity of both path-conditioned channels; degenerate paths are `Undefined`.
pub fn classify_pair(config: &PhysicalConfig, grid: &TimeGrid) -> Result<[Classification; 2]> {
    let mut out = [Classification::Undefined; 2];
    for path in Path::BOTH {
        out[path.index()] = match blp_channel(config, path, grid) {
            Ok(r) => r.classification,
            Err(Error::DegeneratePath { .. }) => Classification::Undefined,
            Err(e) => return Err(e),
        };
    }
    Ok(out)
}

/// Concurrence of the frequency-path environment state, `sqrt(1 − exp(−tau_s²))`.
pub fn concurrence(config: &PhysicalConfig) -> f64 {
    let tau_s = config.reduce().tau_s;
    (-(-tau_s * tau_s).exp_m1()).sqrt()
}
