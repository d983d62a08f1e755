use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "oqi", version, about = "Path-conditioned dephasing, memory effects and Δx sensitivities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decoherence function and |±⟩ trace distance of one exit port over time.
    Trajectory(TrajectoryArgs),
    /// P_0, BLP measures, concurrence and sensitivities over a Δx range.
    Sweep(SweepArgs),
    /// Noise-ensemble sensitivities, one row group per noise width.
    Sensitivity(SensitivityArgs),
    /// Quantum Fisher information and Cramér-Rao bound as JSON.
    Qcrb(QcrbArgs),
    /// Every dataset behind the trajectory, sweep and sensitivity figures.
    FiguresData(FiguresDataArgs),
}

#[derive(Debug, Args)]
pub struct IoArgs {
    /// Flat JSON file with snake_case parameter keys; flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Replays the parameters of an earlier run.
    #[arg(long, value_name = "FILE", conflicts_with = "config")]
    pub manifest: Option<PathBuf>,
    /// Output path; `<out>.manifest.json` is written beside it.
    #[arg(long, short, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    SingleArm,
    Symmetric,
}

#[derive(Debug, Args, Serialize)]
pub struct PhysicsArgs {
    /// Center frequency, Hz [default: c / 780 nm]
    #[arg(long)]
    pub mu_hz: Option<f64>,
    /// Spectral standard deviation, Hz [default: 5.68e11]
    #[arg(long)]
    pub sigma_hz: Option<f64>,
    /// Birefringence n_H - n_V [default: 0.009]
    #[arg(long, allow_hyphen_values = true)]
    pub delta_n: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct GridArgs {
    /// First reduced time 2πσΔn·t [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub tau_min: Option<f64>,
    /// Last reduced time [default: 5]
    #[arg(long, allow_hyphen_values = true)]
    pub tau_max: Option<f64>,
    /// Reduced time step [default: 0.01]
    #[arg(long, allow_hyphen_values = true)]
    pub tau_step: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct RangeArgs {
    /// Sweep start, nm
    #[arg(long, allow_hyphen_values = true)]
    pub delta_x_min_nm: Option<f64>,
    /// Sweep end, nm
    #[arg(long, allow_hyphen_values = true)]
    pub delta_x_max_nm: Option<f64>,
    /// Number of Δx points, endpoints included
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct EnsembleArgs {
    /// Repetitions per point [default: 100]
    #[arg(long)]
    pub reps: Option<usize>,
    /// Base seed of the noise substreams [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Finite-difference step for ∂N/∂Δx, nm [default: 0.1]
    #[arg(long)]
    pub fd_step_nm: Option<f64>,
    /// Convention for the QFI [default: single-arm]
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Debug, Args, Serialize)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: IoArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub physics: PhysicsArgs,
    /// Path difference x_0 - x_1, nm [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub delta_x_nm: Option<f64>,
    /// Exit port [default: 0]
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub path: Option<u8>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: IoArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub range: RangeArgs,
    /// Exit port used for sensitivities [default: 0]
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub path: Option<u8>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    /// Full width 6σ̃ of the state noise; enables sens_n_nm
    #[arg(long)]
    pub noise_fw: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SensitivityArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: IoArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub range: RangeArgs,
    /// Exit port [default: 0]
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub path: Option<u8>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    /// Full width 6σ̃ of the state noise; repeat for several widths
    #[arg(long)]
    pub noise_fw: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct QcrbArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: IoArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub physics: PhysicsArgs,
    /// Path difference, nm; the bound does not depend on it [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub delta_x_nm: Option<f64>,
    /// Number of measurements M [default: 1]
    #[arg(long)]
    pub m: Option<u64>,
    /// Also evaluate the QFI numerically with a grid-convergence check
    #[arg(long)]
    pub oracle: bool,
    /// Convention for how Δx enters the arms [default: single-arm]
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Frequency bins for --oracle [default: 4096]
    #[arg(long)]
    pub f_points: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct FiguresDataArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: IoArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub physics: PhysicsArgs,
    /// Exit port [default: 0]
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub path: Option<u8>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    /// Trajectory path differences, nm; repeatable [default: 5000 5060 5068 5070]
    #[arg(long, allow_hyphen_values = true)]
    pub fig3_delta_x_nm: Vec<f64>,
    /// [default: 4900]
    #[arg(long, allow_hyphen_values = true)]
    pub fig4_min_nm: Option<f64>,
    /// [default: 5250]
    #[arg(long, allow_hyphen_values = true)]
    pub fig4_max_nm: Option<f64>,
    /// [default: 701]
    #[arg(long)]
    pub fig4_steps: Option<usize>,
    /// [default: 104760]
    #[arg(long, allow_hyphen_values = true)]
    pub fig5_min_nm: Option<f64>,
    /// [default: 105060]
    #[arg(long, allow_hyphen_values = true)]
    pub fig5_max_nm: Option<f64>,
    /// [default: 31]
    #[arg(long)]
    pub fig5_steps: Option<usize>,
    /// Noise full widths for the sensitivity dataset; repeatable
    #[arg(long)]
    pub noise_fw: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
}
