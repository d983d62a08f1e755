pub mod qfi;
pub mod sensitivity;
pub mod sweep;

pub use qfi::{qcrb, qfi_closed_form, qfi_numeric, qfi_numeric_oracle, FrequencyGrid, QfiMode, Spectrum};
pub use sensitivity::{
    derivative_blp, path_probability_derivative, sensitivity_blp, sensitivity_probability, BlpSensitivity,
    DEFAULT_FD_STEP,
};
pub use sweep::{emergence_point, local_maxima, local_minima, sweep, sweep_at, sweep_point, NoiseOutcome, SweepRecord, SweepSpec};
