use std::fs;
use std::path::{Path as FsPath, PathBuf};

use oqi_core::metrology::{
    qcrb, qfi_closed_form, qfi_numeric_oracle, sweep_at, FrequencyGrid, NoiseOutcome, Spectrum, SweepRecord,
};
use oqi_core::{apply_dephasing, trace_distance, NoiseConfig, PathChannel, QubitState};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::{Cli, Command, IoArgs};
use crate::error::{CliError, EXIT_ENSEMBLE};
use crate::format::{num, opt, Csv, NA};
use crate::manifest::{manifest_path, RunManifest};
use crate::params::{
    m_to_nm, resolve, to_map, FiguresDataParams, Layer, QcrbParams, SensitivityParams, SweepParams,
    TrajectoryParams,
};

pub const TRAJECTORY_HEADER: [&str; 5] = ["tau", "re_kappa", "im_kappa", "abs_kappa", "trace_distance"];
pub const SWEEP_HEADER: [&str; 10] = [
    "delta_x_nm",
    "p0",
    "n0",
    "n1",
    "concurrence",
    "sens_p_nm",
    "sens_n_nm",
    "qcrb_m1_nm",
    "class0",
    "class1",
];
pub const SENSITIVITY_HEADER: [&str; 7] =
    ["delta_x_nm", "noise_fw", "sens_n_nm", "sens_p_nm", "qcrb_m1_nm", "delta_n_std", "dn_ddx"];

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Trajectory(args) => {
            let p: TrajectoryParams = resolve(layers(&args.io, "trajectory", to_map(&args))?)?;
            let text = trajectory_csv(&p)?;
            emit(args.io.out.as_deref(), &text, || Ok(RunManifest::new("trajectory", p.config()?, to_map(&p), None)))
        }
        Command::Sweep(args) => {
            let p: SweepParams = resolve(layers(&args.io, "sweep", to_map(&args))?)?;
            let text = sweep_csv(&p)?;
            let seed = p.noise_fw.map(|_| p.seed);
            emit(args.io.out.as_deref(), &text, || {
                Ok(RunManifest::new("sweep", p.setup()?.template, to_map(&p), seed))
            })
        }
        Command::Sensitivity(args) => {
            let p: SensitivityParams = resolve(layers(&args.io, "sensitivity", to_map(&args))?)?;
            let text = sensitivity_csv(&p)?;
            emit(args.io.out.as_deref(), &text, || {
                Ok(RunManifest::new("sensitivity", p.setup()?.template, to_map(&p), Some(p.seed)))
            })
        }
        Command::Qcrb(args) => {
            let p: QcrbParams = resolve(layers(&args.io, "qcrb", to_map(&args))?)?;
            let text = qcrb_json(&p)?;
            emit(args.io.out.as_deref(), &text, || Ok(RunManifest::new("qcrb", p.config()?, to_map(&p), None)))
        }
        Command::FiguresData(args) => {
            let p: FiguresDataParams = resolve(layers(&args.io, "figures-data", to_map(&args))?)?;
            let dir = args
                .io
                .out
                .clone()
                .ok_or_else(|| CliError::config("figures-data needs --out <DIR>"))?;
            let written = figures_data(&p, &dir)?;
            for path in written {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn read_json_object(path: &FsPath) -> Result<Map<String, Value>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::config(format!("{}: expected a JSON object", path.display()))),
        Err(e) => Err(CliError::config(format!("{}: {e}", path.display()))),
    }
}

fn layers(io: &IoArgs, command: &str, flags: Map<String, Value>) -> Result<Vec<Layer>, CliError> {
    let mut out = Vec::new();
    if let Some(path) = &io.config {
        out.push(Layer::ConfigFile(read_json_object(path)?));
    }
    if let Some(path) = &io.manifest {
        let manifest = RunManifest::read(path)?;
        manifest.expect_command(command)?;
        out.push(Layer::Manifest(manifest.spec));
    }
    out.push(Layer::Flags(flags));
    Ok(out)
}

fn write_file(path: &FsPath, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(&path.display().to_string(), e))
}

/// Writes `text` to `out` plus its manifest, or to stdout.
fn emit(out: Option<&FsPath>, text: &str, manifest: impl FnOnce() -> Result<RunManifest, CliError>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            write_file(path, text)?;
            manifest()?.write(&manifest_path(path))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn trajectory_csv(p: &TrajectoryParams) -> Result<String, CliError> {
    let config = p.config()?;
    let grid = p.grid()?;
    let channel = PathChannel::new(&config, p.path)?;
    let (plus, minus) = (QubitState::plus(), QubitState::minus());
    let mut csv = Csv::new(&TRAJECTORY_HEADER);
    for (tau, k) in channel.trajectory(&grid).iter() {
        let d = trace_distance(&apply_dephasing(&plus, *k)?, &apply_dephasing(&minus, *k)?);
        csv.row(&[num(tau), num(k.re), num(k.im), num(k.norm()), num(d)]);
    }
    Ok(csv.finish())
}

fn ensemble_failure(record: &SweepRecord, delta_x_nm: f64, noise_fw: f64) -> Option<CliError> {
    match record.noise {
        Some(NoiseOutcome::Failed { failures, repetitions }) => Some(CliError {
            code: EXIT_ENSEMBLE,
            message: format!(
                "ensemble failed at delta_x_nm={} noise_fw={}: {failures} of {repetitions} repetitions aborted",
                num(delta_x_nm),
                num(noise_fw)
            ),
        }),
        _ => None,
    }
}

/// Sensitivity in nm, `na` when undefined.
fn sens_n_token(record: &SweepRecord) -> String {
    match record.noise {
        Some(NoiseOutcome::Evaluated { sens_n, .. }) => num(m_to_nm(sens_n)),
        _ => NA.to_string(),
    }
}

pub fn sweep_csv(p: &SweepParams) -> Result<String, CliError> {
    let mut setup = p.setup()?;
    if let Some(fw) = p.noise_fw {
        setup.spec.noise = Some(NoiseConfig::new(fw, p.reps, p.seed)?.with_grid(setup.spec.grid));
        setup.spec.validate()?;
    }
    let records = sweep_at(&setup.spec, &setup.template, &setup.axis_m())?;
    let mut csv = Csv::new(&SWEEP_HEADER);
    for (r, &x_nm) in records.iter().zip(&setup.axis_nm) {
        if let Some(err) = ensemble_failure(r, x_nm, p.noise_fw.unwrap_or(0.0)) {
            return Err(err);
        }
        csv.row(&[
            num(x_nm),
            num(r.p0),
            opt(r.n0),
            opt(r.n1),
            num(r.concurrence),
            num(m_to_nm(r.sens_p)),
            sens_n_token(r),
            num(m_to_nm(r.qcrb_m1)),
            r.classification[0].as_str().to_string(),
            r.classification[1].as_str().to_string(),
        ]);
    }
    Ok(csv.finish())
}

pub fn sensitivity_csv(p: &SensitivityParams) -> Result<String, CliError> {
    let setup = p.setup()?;
    let mut csv = Csv::new(&SENSITIVITY_HEADER);
    for &fw in &p.noise_fw {
        let mut spec = setup.spec;
        spec.noise = Some(NoiseConfig::new(fw, p.reps, p.seed)?.with_grid(spec.grid));
        spec.validate()?;
        let records = sweep_at(&spec, &setup.template, &setup.axis_m())?;
        for (r, &x_nm) in records.iter().zip(&setup.axis_nm) {
            if let Some(err) = ensemble_failure(r, x_nm, fw) {
                return Err(err);
            }
            let (std, deriv) = match r.noise {
                // ∂N/∂Δx per nm
                Some(NoiseOutcome::Evaluated { delta_n_std, dn_ddx, .. }) => (num(delta_n_std), num(dn_ddx * 1e-9)),
                _ => (NA.to_string(), NA.to_string()),
            };
            csv.row(&[
                num(x_nm),
                num(fw),
                sens_n_token(r),
                num(m_to_nm(r.sens_p)),
                num(m_to_nm(r.qcrb_m1)),
                std,
                deriv,
            ]);
        }
    }
    Ok(csv.finish())
}

#[derive(Debug, Serialize)]
struct QcrbReport {
    /// Per m².
    h_closed: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_numeric: Option<f64>,
    qcrb_m: f64,
    m: u64,
    mode: &'static str,
}

pub fn qcrb_json(p: &QcrbParams) -> Result<String, CliError> {
    let config = p.config()?;
    let h_closed = qfi_closed_form(&config, p.mode);
    let h_numeric = if p.oracle {
        let grid = FrequencyGrid { points: p.f_points, ..FrequencyGrid::default() };
        Some(qfi_numeric_oracle(&config, p.mode, &Spectrum::Gaussian, &grid)?)
    } else {
        None
    };
    let report = QcrbReport {
        h_closed,
        h_numeric,
        qcrb_m: qcrb(h_numeric.unwrap_or(h_closed), p.m),
        m: p.m,
        mode: p.mode.as_str(),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    Ok(text)
}

/// Writes the trajectory family, the Δx sweep and the sensitivity dataset to `dir`.
pub fn figures_data(p: &FiguresDataParams, dir: &FsPath) -> Result<Vec<PathBuf>, CliError> {
    if p.noise_fw.is_empty() {
        return Err(CliError::config("missing required parameter `noise_fw`"));
    }
    // compute everything before touching the file system
    let mut outputs = Vec::new();
    for &dx in &p.fig3_delta_x_nm {
        let tp = p.trajectory(dx);
        let text = trajectory_csv(&tp)?;
        let manifest = RunManifest::new("trajectory", tp.config()?, to_map(&tp), None);
        outputs.push((format!("fig3_dx_{}nm.csv", num(dx)), text, manifest));
    }
    let sp = p.sweep();
    let text = sweep_csv(&sp)?;
    outputs.push(("fig4_sweep.csv".into(), text, RunManifest::new("sweep", sp.setup()?.template, to_map(&sp), None)));
    let np = p.sensitivity();
    let text = sensitivity_csv(&np)?;
    let manifest = RunManifest::new("sensitivity", np.setup()?.template, to_map(&np), Some(np.seed));
    outputs.push(("fig5_sensitivity.csv".into(), text, manifest));

    fs::create_dir_all(dir).map_err(|e| CliError::io(&dir.display().to_string(), e))?;
    let mut written = Vec::new();
    for (name, text, manifest) in outputs {
        let path = dir.join(name);
        write_file(&path, &text)?;
        manifest.write(&manifest_path(&path))?;
        written.push(path);
    }
    let own = RunManifest::new("figures-data", np.setup()?.template, to_map(p), Some(p.seed));
    own.write(&dir.join("figures-data.manifest.json"))?;
    Ok(written)
}
