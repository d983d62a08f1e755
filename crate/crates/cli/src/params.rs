//! Fully resolved command parameters, in the units of the command line (Hz, nm).
//!
//! Values are layered: built-in defaults, then a config file or a replayed
//! manifest, then explicit flags. Keys are the snake_case flag names.

use oqi_core::config::{REFERENCE_DELTA_N, REFERENCE_SIGMA_HZ, REFERENCE_WAVELENGTH};
use oqi_core::metrology::QfiMode;
use oqi_core::noise::DEFAULT_REPETITIONS;
use oqi_core::{Path, PhysicalConfig, TimeGrid, SPEED_OF_LIGHT};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

pub const NM: f64 = 1e-9;

pub fn nm_to_m(x: f64) -> f64 {
    x * NM
}

pub fn m_to_nm(x: f64) -> f64 {
    x / NM
}

fn default_mu() -> f64 {
    SPEED_OF_LIGHT / REFERENCE_WAVELENGTH
}

fn physical(mu_hz: f64, sigma_hz: f64, delta_n: f64, delta_x_nm: f64) -> Result<PhysicalConfig, CliError> {
    Ok(PhysicalConfig::new(mu_hz, sigma_hz, delta_n, nm_to_m(delta_x_nm))?)
}

fn required<T: Copy>(value: Option<T>, key: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::config(format!("missing required parameter `{key}`")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryParams {
    pub mu_hz: f64,
    pub sigma_hz: f64,
    pub delta_n: f64,
    pub delta_x_nm: f64,
    pub path: Path,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_step: f64,
}

impl Default for TrajectoryParams {
    fn default() -> Self {
        let grid = TimeGrid::default();
        Self {
            mu_hz: default_mu(),
            sigma_hz: REFERENCE_SIGMA_HZ,
            delta_n: REFERENCE_DELTA_N,
            delta_x_nm: 0.0,
            path: Path::Zero,
            tau_min: grid.tau_min,
            tau_max: grid.tau_max,
            tau_step: grid.tau_step,
        }
    }
}

impl TrajectoryParams {
    pub fn config(&self) -> Result<PhysicalConfig, CliError> {
        physical(self.mu_hz, self.sigma_hz, self.delta_n, self.delta_x_nm)
    }

    pub fn grid(&self) -> Result<TimeGrid, CliError> {
        Ok(TimeGrid::new(self.tau_min, self.tau_max, self.tau_step)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    pub mu_hz: f64,
    pub sigma_hz: f64,
    pub delta_n: f64,
    pub delta_x_min_nm: Option<f64>,
    pub delta_x_max_nm: Option<f64>,
    pub steps: Option<usize>,
    pub path: Path,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_step: f64,
    pub noise_fw: Option<f64>,
    pub reps: usize,
    pub seed: u64,
    pub fd_step_nm: f64,
    pub mode: QfiMode,
}

impl Default for SweepParams {
    fn default() -> Self {
        let t = TrajectoryParams::default();
        Self {
            mu_hz: t.mu_hz,
            sigma_hz: t.sigma_hz,
            delta_n: t.delta_n,
            delta_x_min_nm: None,
            delta_x_max_nm: None,
            steps: None,
            path: Path::Zero,
            tau_min: t.tau_min,
            tau_max: t.tau_max,
            tau_step: t.tau_step,
            noise_fw: None,
            reps: DEFAULT_REPETITIONS,
            seed: 0,
            fd_step_nm: m_to_nm(oqi_core::metrology::DEFAULT_FD_STEP),
            mode: QfiMode::SingleArm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityParams {
    pub mu_hz: f64,
    pub sigma_hz: f64,
    pub delta_n: f64,
    pub delta_x_min_nm: Option<f64>,
    pub delta_x_max_nm: Option<f64>,
    pub steps: Option<usize>,
    pub path: Path,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_step: f64,
    /// One row group per full width.
    pub noise_fw: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    pub fd_step_nm: f64,
    pub mode: QfiMode,
}

impl Default for SensitivityParams {
    fn default() -> Self {
        let s = SweepParams::default();
        Self {
            mu_hz: s.mu_hz,
            sigma_hz: s.sigma_hz,
            delta_n: s.delta_n,
            delta_x_min_nm: None,
            delta_x_max_nm: None,
            steps: None,
            path: s.path,
            tau_min: s.tau_min,
            tau_max: s.tau_max,
            tau_step: s.tau_step,
            noise_fw: Vec::new(),
            reps: s.reps,
            seed: s.seed,
            fd_step_nm: s.fd_step_nm,
            mode: s.mode,
        }
    }
}

/// `steps` evenly spaced values from `lo` to `hi` inclusive.
pub fn linear_axis(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let spacing = (hi - lo) / (steps - 1) as f64;
    (0..steps)
        .map(|i| if i + 1 == steps { hi } else { lo + i as f64 * spacing })
        .collect()
}

/// Pieces shared by the sweep-shaped commands.
pub struct SweepSetup {
    pub template: PhysicalConfig,
    pub spec: oqi_core::metrology::SweepSpec,
    /// Sweep points in nm; the core evaluates their conversion to meters.
    pub axis_nm: Vec<f64>,
}

impl SweepSetup {
    pub fn axis_m(&self) -> Vec<f64> {
        self.axis_nm.iter().map(|&x| nm_to_m(x)).collect()
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep_setup(
    mu_hz: f64,
    sigma_hz: f64,
    delta_n: f64,
    bounds: (Option<f64>, Option<f64>, Option<usize>),
    path: Path,
    grid: (f64, f64, f64),
    fd_step_nm: f64,
    mode: QfiMode,
) -> Result<SweepSetup, CliError> {
    let template = physical(mu_hz, sigma_hz, delta_n, 0.0)?;
    let lo = required(bounds.0, "delta_x_min_nm")?;
    let hi = required(bounds.1, "delta_x_max_nm")?;
    let steps = required(bounds.2, "steps")?;
    let spec = oqi_core::metrology::SweepSpec {
        delta_x_min: nm_to_m(lo),
        delta_x_max: nm_to_m(hi),
        steps,
        path,
        grid: TimeGrid::new(grid.0, grid.1, grid.2)?,
        noise: None,
        fd_step: nm_to_m(fd_step_nm),
        qfi_mode: mode,
    };
    spec.validate()?;
    Ok(SweepSetup { template, spec, axis_nm: linear_axis(lo, hi, steps) })
}

impl SweepParams {
    pub fn setup(&self) -> Result<SweepSetup, CliError> {
        sweep_setup(
            self.mu_hz,
            self.sigma_hz,
            self.delta_n,
            (self.delta_x_min_nm, self.delta_x_max_nm, self.steps),
            self.path,
            (self.tau_min, self.tau_max, self.tau_step),
            self.fd_step_nm,
            self.mode,
        )
    }
}

impl SensitivityParams {
    pub fn setup(&self) -> Result<SweepSetup, CliError> {
        if self.noise_fw.is_empty() {
            return Err(CliError::config("missing required parameter `noise_fw`"));
        }
        sweep_setup(
            self.mu_hz,
            self.sigma_hz,
            self.delta_n,
            (self.delta_x_min_nm, self.delta_x_max_nm, self.steps),
            self.path,
            (self.tau_min, self.tau_max, self.tau_step),
            self.fd_step_nm,
            self.mode,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QcrbParams {
    pub mu_hz: f64,
    pub sigma_hz: f64,
    pub delta_n: f64,
    pub delta_x_nm: f64,
    pub m: u64,
    pub oracle: bool,
    pub mode: QfiMode,
    /// Frequency bins of the numerical oracle.
    pub f_points: usize,
}

impl Default for QcrbParams {
    fn default() -> Self {
        let t = TrajectoryParams::default();
        Self {
            mu_hz: t.mu_hz,
            sigma_hz: t.sigma_hz,
            delta_n: t.delta_n,
            delta_x_nm: 0.0,
            m: 1,
            oracle: false,
            mode: QfiMode::SingleArm,
            f_points: oqi_core::metrology::FrequencyGrid::default().points,
        }
    }
}

impl QcrbParams {
    pub fn config(&self) -> Result<PhysicalConfig, CliError> {
        if self.m == 0 {
            return Err(CliError::config("invalid parameter `m`: must be >= 1"));
        }
        physical(self.mu_hz, self.sigma_hz, self.delta_n, self.delta_x_nm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiguresDataParams {
    pub mu_hz: f64,
    pub sigma_hz: f64,
    pub delta_n: f64,
    pub path: Path,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_step: f64,
    /// Path differences of the trajectory family.
    pub fig3_delta_x_nm: Vec<f64>,
    pub fig4_min_nm: f64,
    pub fig4_max_nm: f64,
    pub fig4_steps: usize,
    pub fig5_min_nm: f64,
    pub fig5_max_nm: f64,
    pub fig5_steps: usize,
    pub noise_fw: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    pub fd_step_nm: f64,
    pub mode: QfiMode,
}

impl Default for FiguresDataParams {
    fn default() -> Self {
        let s = SweepParams::default();
        Self {
            mu_hz: s.mu_hz,
            sigma_hz: s.sigma_hz,
            delta_n: s.delta_n,
            path: s.path,
            tau_min: s.tau_min,
            tau_max: s.tau_max,
            tau_step: s.tau_step,
            fig3_delta_x_nm: vec![5000.0, 5060.0, 5068.0, 5070.0],
            fig4_min_nm: 4900.0,
            fig4_max_nm: 5250.0,
            fig4_steps: 701,
            fig5_min_nm: 104_760.0,
            fig5_max_nm: 105_060.0,
            fig5_steps: 31,
            noise_fw: Vec::new(),
            reps: s.reps,
            seed: s.seed,
            fd_step_nm: s.fd_step_nm,
            mode: s.mode,
        }
    }
}

impl FiguresDataParams {
    pub fn trajectory(&self, delta_x_nm: f64) -> TrajectoryParams {
        TrajectoryParams {
            mu_hz: self.mu_hz,
            sigma_hz: self.sigma_hz,
            delta_n: self.delta_n,
            delta_x_nm,
            path: self.path,
            tau_min: self.tau_min,
            tau_max: self.tau_max,
            tau_step: self.tau_step,
        }
    }

    pub fn sweep(&self) -> SweepParams {
        SweepParams {
            mu_hz: self.mu_hz,
            sigma_hz: self.sigma_hz,
            delta_n: self.delta_n,
            delta_x_min_nm: Some(self.fig4_min_nm),
            delta_x_max_nm: Some(self.fig4_max_nm),
            steps: Some(self.fig4_steps),
            path: self.path,
            tau_min: self.tau_min,
            tau_max: self.tau_max,
            tau_step: self.tau_step,
            noise_fw: None,
            reps: self.reps,
            seed: self.seed,
            fd_step_nm: self.fd_step_nm,
            mode: self.mode,
        }
    }

    pub fn sensitivity(&self) -> SensitivityParams {
        SensitivityParams {
            mu_hz: self.mu_hz,
            sigma_hz: self.sigma_hz,
            delta_n: self.delta_n,
            delta_x_min_nm: Some(self.fig5_min_nm),
            delta_x_max_nm: Some(self.fig5_max_nm),
            steps: Some(self.fig5_steps),
            path: self.path,
            tau_min: self.tau_min,
            tau_max: self.tau_max,
            tau_step: self.tau_step,
            noise_fw: self.noise_fw.clone(),
            reps: self.reps,
            seed: self.seed,
            fd_step_nm: self.fd_step_nm,
            mode: self.mode,
        }
    }
}

fn object<T: Serialize>(value: &T) -> Map<String, Value> {
    match serde_json::to_value(value) {
        Ok(Value::Object(map)) => map,
        _ => unreachable!("parameter structs serialize to objects"),
    }
}

/// Keys understood by at least one command.
fn known_anywhere(key: &str) -> bool {
    object(&TrajectoryParams::default()).contains_key(key)
        || object(&SweepParams::default()).contains_key(key)
        || object(&SensitivityParams::default()).contains_key(key)
        || object(&QcrbParams::default()).contains_key(key)
        || object(&FiguresDataParams::default()).contains_key(key)
}

/// Source of one parameter layer.
pub enum Layer {
    /// Shared config file: keys of other commands are ignored.
    ConfigFile(Map<String, Value>),
    /// Replayed manifest: every key must belong to this command.
    Manifest(Map<String, Value>),
    /// Serialized flags; unset values are skipped.
    Flags(Map<String, Value>),
}

/// Applies `layers` over the defaults of `P` and deserializes the result.
pub fn resolve<P>(layers: Vec<Layer>) -> Result<P, CliError>
where
    P: Default + Serialize + DeserializeOwned,
{
    let mut merged = object(&P::default());
    for layer in layers {
        match layer {
            Layer::ConfigFile(map) => {
                for (k, v) in map {
                    if merged.contains_key(&k) {
                        merged.insert(k, v);
                    } else if !known_anywhere(&k) {
                        return Err(CliError::config(format!("unknown key `{k}` in config file")));
                    }
                }
            }
            Layer::Manifest(map) => {
                for (k, v) in map {
                    if !merged.contains_key(&k) {
                        return Err(CliError::config(format!("unknown key `{k}` in manifest")));
                    }
                    merged.insert(k, v);
                }
            }
            Layer::Flags(map) => {
                for (k, v) in map {
                    let unset = match &v {
                        Value::Null | Value::Bool(false) => true,
                        Value::Array(a) => a.is_empty(),
                        _ => false,
                    };
                    if !unset {
                        merged.insert(k, v);
                    }
                }
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::config(format!("invalid parameters: {e}")))
}

pub fn to_map<T: Serialize>(value: &T) -> Map<String, Value> {
    object(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn map(v: Value) -> Map<String, Value> {
        v.as_object().unwrap().clone()
    }

    #[test]
    fn flags_override_file() {
        let p: TrajectoryParams = resolve(vec![
            Layer::ConfigFile(map(json!({"delta_x_nm": 5070.0, "tau_step": 0.02}))),
            Layer::Flags(map(json!({"delta_x_nm": 100.0, "tau_max": null}))),
        ])
        .unwrap();
        assert_eq!(p.delta_x_nm, 100.0);
        assert_eq!(p.tau_step, 0.02);
        assert_eq!(p.tau_max, 5.0);
    }

    #[test]
    fn file_may_carry_other_commands_keys() {
        let p: QcrbParams = resolve(vec![Layer::ConfigFile(map(json!({"tau_step": 0.02, "m": 4})))]).unwrap();
        assert_eq!(p.m, 4);
        let err = resolve::<QcrbParams>(vec![Layer::ConfigFile(map(json!({"tau_stp": 0.02})))]).unwrap_err();
        assert!(err.message.contains("tau_stp"));
    }

    #[test]
    fn manifest_is_strict() {
        let err = resolve::<QcrbParams>(vec![Layer::Manifest(map(json!({"tau_step": 0.02})))]).unwrap_err();
        assert_eq!(err.code, crate::error::EXIT_CONFIG);
    }

    #[test]
    fn bad_types_are_config_errors() {
        let err = resolve::<TrajectoryParams>(vec![Layer::Flags(map(json!({"path": 2})))]).unwrap_err();
        assert_eq!(err.code, crate::error::EXIT_CONFIG);
        let err = resolve::<QcrbParams>(vec![Layer::Flags(map(json!({"mode": "sideways"})))]).unwrap_err();
        assert_eq!(err.code, crate::error::EXIT_CONFIG);
    }

    #[test]
    fn sweep_bounds_required() {
        let err = SweepParams::default().setup().err().unwrap();
        assert!(err.message.contains("delta_x_min_nm"));
    }

    #[test]
    fn default_params_round_trip() {
        let p = FiguresDataParams::default();
        let back: FiguresDataParams = resolve(vec![Layer::Manifest(to_map(&p))]).unwrap();
        assert_eq!(p, back);
    }
}
