//! One simulate → initialize → solve → evaluate run.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use mscs_core::analysis::{AnalysisConfig, AnalysisTransform, ExtendedAnalysis};
use mscs_core::cube::default_wavelengths;
use mscs_core::msrc::{generate_aperture, DiffractionKernel, MsrcOperator, Optics};
use mscs_core::msvi::MsviOperator;
use mscs_core::solver::{admm_solve, tikhonov_init, AdmmParams, Problem, Solution, Telemetry, TikhonovInit};
use mscs_core::{make_layout, Architecture, ExperimentConfig, ExtendedSensing, LayoutKind, MSCube, MeasurementFrame};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::baseline::nn_demosaick;
use crate::dataset::{read_raw_cube, synthetic_cube};
use crate::error::{HarnessError, Result};
use crate::metrics::{cube_psnr, per_band_psnr};
use crate::noise::add_noise;

/// Builds the sensing operator described by `config`.
pub fn build_sensing(config: &ExperimentConfig) -> Result<Box<dyn ExtendedSensing>> {
    config.validate()?;
    let layout = make_layout(
        config.layout,
        config.sensor_rows,
        config.sensor_cols,
        config.bands,
        config.period,
        config.layout_seed,
    )?;
    Ok(match config.architecture {
        Architecture::Msvi => Box::new(MsviOperator::new(layout, config.rows, config.cols)?),
        Architecture::Msrc => {
            let aperture = generate_aperture(
                (config.rows, config.cols),
                (config.sensor_rows, config.sensor_cols),
                config.snapshots,
                config.aperture_seed,
            )?;
            let kernels = match config.optics() {
                None => None,
                Some((aperture_pitch, sensor_pitch, focal)) => {
                    let optics = Optics::new(aperture_pitch, sensor_pitch, focal)?;
                    Some(
                        default_wavelengths(config.bands)
                            .into_iter()
                            .map(|l| DiffractionKernel::new(optics, l))
                            .collect::<std::result::Result<Vec<_>, _>>()?,
                    )
                }
            };
            Box::new(MsrcOperator::new(layout, (config.rows, config.cols), aperture, kernels)?)
        }
    })
}

/// Hex SHA-256 of the operator's dimensions and of its response to a fixed
/// probe vector.
pub fn fingerprint(sensing: &dyn ExtendedSensing) -> Result<String> {
    let n = sensing.in_dim();
    let probe: Vec<f64> = (0..n).map(|k| ((k * 7919 + 13) % 1009) as f64 / 1009.0).collect();
    let response = sensing.apply(&probe)?;
    let mut hasher = Sha256::new();
    for d in [n, sensing.out_dim()] {
        hasher.update((d as u64).to_le_bytes());
    }
    for v in response {
        hasher.update(v.to_le_bytes());
    }
    Ok(hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// Ground truth named by `config.scene`: `"synthetic"` or a raw cube path.
pub fn load_scene(config: &ExperimentConfig) -> Result<MSCube> {
    let cube = if config.scene == "synthetic" {
        synthetic_cube(config.rows, config.cols, config.bands, config.scene_seed)?
    } else {
        read_raw_cube(Path::new(&config.scene))?
    };
    if (cube.rows(), cube.cols(), cube.bands()) != (config.rows, config.cols, config.bands) {
        return Err(HarnessError::Data(format!(
            "scene {} is {}x{}x{}, config expects {}x{}x{}",
            config.scene,
            cube.rows(),
            cube.cols(),
            cube.bands(),
            config.rows,
            config.cols,
            config.bands
        )));
    }
    Ok(cube)
}

/// Noisy measurements of `cube`; the frame's noise bound is the exact noise norm.
pub fn simulate(
    config: &ExperimentConfig,
    sensing: &dyn ExtendedSensing,
    cube: &MSCube,
) -> Result<MeasurementFrame> {
    let clean = sensing.apply(&cube.vectorize())?;
    let (noisy, tau) = add_noise(&clean, config.snr_db, config.noise_seed);
    let rows = sensing.layout().rows();
    let cols = sensing.layout().cols();
    Ok(MeasurementFrame::from_vector(&noisy, rows, cols, tau)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub rate: f64,
    pub psnr: f64,
    pub init_psnr: f64,
    /// Nearest-neighbor demosaicking, mosaic layouts only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline_psnr: Option<f64>,
    pub per_band_psnr: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub init_cg_iterations: usize,
    pub tau: f64,
    pub feasibility_gap: f64,
    pub objective: f64,
    pub wall_time_s: f64,
    pub simulation_fingerprint: String,
    pub reconstruction_fingerprint: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub config: ExperimentConfig,
}

impl RunReport {
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }

    /// Whether the same operator produced and inverted the measurements.
    pub fn operators_match(&self) -> bool {
        self.simulation_fingerprint == self.reconstruction_fingerprint
    }
}

pub struct RunOutcome {
    pub report: RunReport,
    pub reconstruction: MSCube,
    pub initialization: MSCube,
    pub telemetry: Telemetry,
}

pub struct Reconstruction {
    pub init: TikhonovInit,
    pub solution: Solution,
}

/// Reconstructs `frame` with `sensing`, starting from the Tikhonov estimate.
pub fn reconstruct(
    config: &ExperimentConfig,
    sensing: &dyn ExtendedSensing,
    frame: &MeasurementFrame,
) -> Result<Reconstruction> {
    let init = tikhonov_init(sensing, frame, frame.noise_bound)?;
    let (rows, cols, bands) = sensing.cube_dims();
    let tight = Arc::new(AnalysisTransform::new(rows, cols, bands, &AnalysisConfig::default())?);
    let prior = ExtendedAnalysis::new(tight, sensing.r_n())?;
    let y = frame.vectorize();
    let problem = Problem::new(sensing, &prior, &y, frame.noise_bound)?;
    let solution = admm_solve(&problem, &AdmmParams::from_config(config), Some(&init.x))?;
    Ok(Reconstruction { init, solution })
}

/// Simulates and reconstructs `scene` under `config`.
pub fn run_on_scene(config: &ExperimentConfig, scene: &MSCube) -> Result<RunOutcome> {
    let start = Instant::now();
    let sensing = build_sensing(config)?;
    let simulation_fingerprint = fingerprint(sensing.as_ref())?;
    let frame = simulate(config, sensing.as_ref(), scene)?;
    let Reconstruction { init, solution } = reconstruct(config, sensing.as_ref(), &frame)?;
    let reconstruction_fingerprint = fingerprint(sensing.as_ref())?;

    let wavelengths = scene.wavelengths().to_vec();
    let reconstruction = scene.with_values(&solution.x)?;
    let initialization = scene.with_values(&init.x)?;
    let baseline_psnr = if config.architecture == Architecture::Msvi && config.layout == LayoutKind::Mosaic {
        nn_demosaick(&frame, sensing.layout(), config.rows, config.cols, wavelengths)
            .ok()
            .map(|b| cube_psnr(&b, scene))
            .transpose()?
    } else {
        None
    };
    let report = RunReport {
        rate: config.subsampling_rate(),
        psnr: cube_psnr(&reconstruction, scene)?,
        init_psnr: cube_psnr(&initialization, scene)?,
        baseline_psnr,
        per_band_psnr: per_band_psnr(&reconstruction, scene)?,
        iterations: solution.iterations,
        converged: solution.converged,
        init_cg_iterations: init.cg.iterations,
        tau: frame.noise_bound,
        feasibility_gap: solution.feasibility_gap,
        objective: solution.objective,
        wall_time_s: start.elapsed().as_secs_f64(),
        simulation_fingerprint,
        reconstruction_fingerprint,
        output: None,
        config: config.clone(),
    };
    Ok(RunOutcome {
        report,
        reconstruction,
        initialization,
        telemetry: solution.telemetry,
    })
}

/// Loads the configured scene and runs it.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutcome> {
    let scene = load_scene(config)?;
    run_on_scene(config, &scene)
}
