//! Δx sweeps: path probability, BLP measures of both exits, concurrence,
//! sensitivities and the quantum Cramér-Rao bound on one axis.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::qfi::{qcrb, qfi_closed_form, QfiMode};
use super::sensitivity::{derivative_blp, sensitivity_probability, BLP_DERIVATIVE_FLOOR, DEFAULT_FD_STEP};
use crate::config::{Path, PhysicalConfig};
use crate::dephasing::path_probability;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::noise::{derive_seed, ensemble, NoiseConfig};
use crate::nonmarkovianity::{blp_channel, concurrence, Classification, BLP_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// m
    pub delta_x_min: f64,
    /// m
    pub delta_x_max: f64,
    /// Number of Δx points, endpoints included.
    pub steps: usize,
    /// Exit port used for the sensitivities.
    pub path: Path,
    pub grid: TimeGrid,
    pub noise: Option<NoiseConfig>,
    /// Step for `∂N/∂Δx`, m.
    pub fd_step: f64,
    pub qfi_mode: QfiMode,
}

impl SweepSpec {
    pub fn new(delta_x_min: f64, delta_x_max: f64, steps: usize) -> Result<Self> {
        let spec = Self {
            delta_x_min,
            delta_x_max,
            steps,
            path: Path::Zero,
            grid: TimeGrid::default(),
            noise: None,
            fd_step: DEFAULT_FD_STEP,
            qfi_mode: QfiMode::SingleArm,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_x_min.is_finite() && self.delta_x_max.is_finite() && self.delta_x_min < self.delta_x_max) {
            return Err(Error::invalid(
                "delta_x_max",
                format!("need delta_x_min < delta_x_max, got [{}, {}]", self.delta_x_min, self.delta_x_max),
            ));
        }
        if self.steps < 2 {
            return Err(Error::invalid("steps", format!("need at least 2 points, got {}", self.steps)));
        }
        let spacing_bound = (self.delta_x_max - self.delta_x_min) / self.steps as f64;
        if !(self.fd_step > 0.0 && self.fd_step < spacing_bound) {
            return Err(Error::invalid(
                "fd_step",
                format!("must lie in (0, {spacing_bound:e}) m, got {:e}", self.fd_step),
            ));
        }
        self.grid.validate()?;
        if let Some(noise) = &self.noise {
            noise.validate()?;
        }
        Ok(())
    }

    pub fn delta_x(&self, index: usize) -> f64 {
        if index + 1 == self.steps {
            return self.delta_x_max;
        }
        let spacing = (self.delta_x_max - self.delta_x_min) / (self.steps - 1) as f64;
        self.delta_x_min + index as f64 * spacing
    }

    pub fn spacing(&self) -> f64 {
        (self.delta_x_max - self.delta_x_min) / (self.steps - 1) as f64
    }
}

/// Noise-dependent part of a sweep record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoiseOutcome {
    Evaluated {
        /// `ΔN / |∂N/∂Δx|`, m; infinite when the derivative vanishes.
        sens_n: f64,
        /// `ΔN`
        delta_n_std: f64,
        /// `∂N/∂Δx`, per meter.
        dn_ddx: f64,
        failures: usize,
    },
    /// More than half the repetitions aborted.
    Failed { failures: usize, repetitions: usize },
    /// The path used for sensitivities is degenerate here.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    /// m
    pub delta_x: f64,
    pub p0: f64,
    /// `None` where the channel is undefined.
    pub n0: Option<f64>,
    pub n1: Option<f64>,
    pub concurrence: f64,
    /// Sensitivity of the exit-port probability, m.
    pub sens_p: f64,
    /// QCRB at one measurement, m.
    pub qcrb_m1: f64,
    pub classification: [Classification; 2],
    /// Present when the sweep carries a noise configuration.
    pub noise: Option<NoiseOutcome>,
    pub grid_too_short: bool,
}

impl SweepRecord {
    pub fn n(&self, path: Path) -> Option<f64> {
        match path {
            Path::Zero => self.n0,
            Path::One => self.n1,
        }
    }

    pub fn sens_n(&self) -> Option<f64> {
        match self.noise {
            Some(NoiseOutcome::Evaluated { sens_n, .. }) => Some(sens_n),
            _ => None,
        }
    }
}

/// Evaluates the sweep at `delta_x`. `index` selects the noise substream seed.
pub fn sweep_point(spec: &SweepSpec, template: &PhysicalConfig, index: usize, delta_x: f64) -> Result<SweepRecord> {
    let config = template.with_delta_x(delta_x);
    let qcrb_m1 = qcrb(qfi_closed_form(template, spec.qfi_mode), 1);

    let mut n = [None, None];
    let mut classification = [Classification::Undefined; 2];
    let mut grid_too_short = false;
    for path in Path::BOTH {
        match blp_channel(&config, path, &spec.grid) {
            Ok(r) => {
                n[path.index()] = Some(r.measure);
                classification[path.index()] = r.classification;
                grid_too_short |= r.grid_too_short;
            }
            Err(Error::DegeneratePath { .. }) => {}
            Err(e) => return Err(e),
        }
    }

    let noise = match &spec.noise {
        None => None,
        Some(_) if n[spec.path.index()].is_none() => Some(NoiseOutcome::Degenerate),
        Some(noise) => Some(noise_outcome(spec, &config, noise, index)?),
    };

    Ok(SweepRecord {
        delta_x,
        p0: path_probability(&config, Path::Zero),
        n0: n[0],
        n1: n[1],
        concurrence: concurrence(&config),
        sens_p: sensitivity_probability(&config, spec.path),
        qcrb_m1,
        classification,
        noise,
        grid_too_short,
    })
}

fn noise_outcome(spec: &SweepSpec, config: &PhysicalConfig, noise: &NoiseConfig, index: usize) -> Result<NoiseOutcome> {
    let dn_ddx = match derivative_blp(config, spec.path, &spec.grid, spec.fd_step) {
        Ok(d) => d,
        Err(Error::DegeneratePath { .. }) => return Ok(NoiseOutcome::Degenerate),
        Err(e) => return Err(e),
    };
    let noise = noise.with_grid(spec.grid).with_seed(derive_seed(noise.seed, index as u64));
    match ensemble(config, spec.path, &noise) {
        Ok(ens) => {
            let sens_n = if dn_ddx.abs() < BLP_DERIVATIVE_FLOOR {
                f64::INFINITY
            } else {
                ens.std_measure / dn_ddx.abs()
            };
            Ok(NoiseOutcome::Evaluated { sens_n, delta_n_std: ens.std_measure, dn_ddx, failures: ens.failures })
        }
        Err(Error::EnsembleFailed { failures, repetitions }) => Ok(NoiseOutcome::Failed { failures, repetitions }),
        Err(e) => Err(e),
    }
}

/// Evaluates every point of `spec` in parallel; records are in Δx order.
pub fn sweep(spec: &SweepSpec, template: &PhysicalConfig) -> Result<Vec<SweepRecord>> {
    let points: Vec<f64> = (0..spec.steps).map(|i| spec.delta_x(i)).collect();
    sweep_at(spec, template, &points)
}

/// Like [`sweep`] but on caller-supplied Δx values, e.g. an axis laid out in
/// other units. The range and step count of `spec` are still validated.
pub fn sweep_at(spec: &SweepSpec, template: &PhysicalConfig, delta_x: &[f64]) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    template.validate()?;
    delta_x
        .par_iter()
        .enumerate()
        .map(|(i, &x)| sweep_point(spec, template, i, x))
        .collect()
}

/// First Δx at which `N_path` exceeds the classification threshold.
pub fn emergence_point(records: &[SweepRecord], path: Path) -> Option<f64> {
    records
        .iter()
        .find(|r| r.n(path).is_some_and(|n| n > BLP_THRESHOLD))
        .map(|r| r.delta_x)
}

/// Indices of strict interior local minima of `values`.
///
/// A plateau counts once, at its first index.
pub fn local_minima(values: &[f64]) -> Vec<usize> {
    extrema(values, |a, b| a < b)
}

/// Indices of strict interior local maxima of `values`.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    extrema(values, |a, b| a > b)
}

fn extrema(values: &[f64], better: impl Fn(f64, f64) -> bool) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < values.len() {
        if better(values[i], values[i - 1]) {
            let mut j = i;
            while j + 1 < values.len() && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < values.len() && better(values[i], values[j + 1]) {
                out.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(SweepSpec::new(1.0, 0.0, 10).is_err());
        assert!(SweepSpec::new(0.0, 1e-6, 1).is_err());
        // spacing 1e-11 m is below the default fd step
        let err = SweepSpec::new(0.0, 1e-9, 100).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig { field: "fd_step", .. }));
    }

    #[test]
    fn endpoints_exact() {
        let spec = SweepSpec::new(4900e-9, 5250e-9, 701).unwrap();
        assert_eq!(spec.delta_x(0), 4900e-9);
        assert_eq!(spec.delta_x(700), 5250e-9);
        assert!((spec.delta_x(340) - 5070e-9).abs() < 1e-18);
    }

    #[test]
    fn extrema_helpers() {
        let v = [3.0, 1.0, 2.0, 2.0, 5.0, 0.0, 0.0, 4.0];
        assert_eq!(local_minima(&v), vec![1, 5]);
        assert_eq!(local_maxima(&v), vec![4]);
        assert!(local_maxima(&[0.0, 0.0, 0.0]).is_empty());
    }

    #[test]
    fn qcrb_constant_and_records_ordered() {
        let spec = SweepSpec::new(5000e-9, 5150e-9, 31).unwrap();
        let recs = sweep(&spec, &PhysicalConfig::reference(0.0)).unwrap();
        assert_eq!(recs.len(), 31);
        assert!(recs.windows(2).all(|w| w[0].delta_x < w[1].delta_x));
        assert!(recs.iter().all(|r| r.qcrb_m1 == recs[0].qcrb_m1));
    }

    #[test]
    fn degenerate_point_marked_not_fatal() {
        let spec = SweepSpec::new(-100e-9, 100e-9, 3).unwrap();
        let recs = sweep(&spec, &PhysicalConfig::reference(0.0)).unwrap();
        assert_eq!(recs[1].delta_x, 0.0);
        assert_eq!(recs[1].n1, None);
        assert_eq!(recs[1].classification[1], Classification::Undefined);
        assert_eq!(recs[1].sens_p, f64::INFINITY);
    }

    #[test]
    fn sign_symmetric_records() {
        let plus = SweepSpec::new(5000e-9, 5140e-9, 15).unwrap();
        let minus = SweepSpec::new(-5140e-9, -5000e-9, 15).unwrap();
        let template = PhysicalConfig::reference(0.0);
        let a = sweep(&plus, &template).unwrap();
        let b = sweep(&minus, &template).unwrap();
        for (ra, rb) in a.iter().zip(b.iter().rev()) {
            assert_eq!(ra.delta_x, -rb.delta_x);
            assert_eq!(ra.p0, rb.p0);
            assert_eq!(ra.n0, rb.n0);
            assert_eq!(ra.n1, rb.n1);
            assert_eq!(ra.concurrence, rb.concurrence);
        }
    }
}
