use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mscs_core::cube::default_wavelengths;
use mscs_core::msrc::{Optics, SizingReport};
use mscs_core::{Architecture, ExperimentConfig};
use mscs_harness::dataset::{
    ingest_band_directory, read_frame, read_raw_cube, write_frame, write_raw_cube, BandDirectory, Roi,
};
use mscs_harness::experiment::{build_sensing, fingerprint, load_scene, reconstruct, simulate, RunReport};
use mscs_harness::metrics::{cube_psnr, per_band_psnr};
use mscs_harness::selftest::run_selftest;
use mscs_harness::sweep::{
    band_montage, curve_colors, monotonicity_violations, plot_curves, run_sweep, summarize, write_csv, SweepSpec,
};
use mscs_harness::{run_on_scene, HarnessError, Result};

#[derive(Parser)]
#[command(name = "mscs", version, about = "Multispectral compressive imaging: simulate, reconstruct, evaluate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment TOML file; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key, e.g. `--set snr_db=20 --set architecture=msrc`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut table: toml::Table = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
                toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?
            }
            None => toml::Table::new(),
        };
        for item in &self.overrides {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| config_error(format!("--set expects KEY=VALUE, got {item:?}")))?;
            let value: toml::Value = format!("v = {value}")
                .parse::<toml::Table>()
                .ok()
                .and_then(|mut t| t.remove("v"))
                .unwrap_or_else(|| toml::Value::String(value.to_owned()));
            table.insert(key.trim().to_owned(), value);
        }
        Ok(ExperimentConfig::from_toml_str(&toml::to_string(&table).expect("table serializes"))?)
    }
}

fn config_error(msg: String) -> HarnessError {
    mscs_core::Error::Config(msg).into()
}

#[derive(Subcommand)]
enum Command {
    /// Build a raw cube from a directory of per-band PNG images.
    Ingest {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value_t = 400.0)]
        first_nm: f64,
        #[arg(long, default_value_t = 10.0)]
        step_nm: f64,
        #[arg(long, default_value_t = 16)]
        bands: usize,
        #[arg(long)]
        center_row: usize,
        #[arg(long)]
        center_col: usize,
        #[arg(long, default_value_t = 256)]
        size: usize,
        /// Box-average factor applied after cropping.
        #[arg(long, default_value_t = 1)]
        downsample: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        montage: Option<PathBuf>,
    },
    /// Measure the configured scene and write the noisy frame.
    Simulate {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct a frame written by `simulate` with the same configuration.
    Reconstruct {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Ground truth for PSNR in the report.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        telemetry: Option<PathBuf>,
        #[arg(long)]
        montage: Option<PathBuf>,
    },
    /// Simulate, reconstruct and evaluate in one go.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run a sweep file; writes sweep.csv, summary.csv and psnr.png.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Print aperture, lens and PSF sizing for the configured MSRC optics.
    SizingReport {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Fast internal consistency checks.
    Selftest,
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Ingest {
            dir,
            first_nm,
            step_nm,
            bands,
            center_row,
            center_col,
            size,
            downsample,
            out,
            montage,
        } => {
            let source = BandDirectory {
                dir,
                first_nm,
                step_nm,
            };
            let roi = Roi {
                center: (center_row, center_col),
                size,
            };
            let cube = ingest_band_directory(&source, &default_wavelengths(bands), roi, downsample)?;
            write_raw_cube(&out, &cube)?;
            if let Some(path) = montage {
                band_montage(&cube, &path)?;
            }
            println!("wrote {}x{}x{} cube to {}", cube.rows(), cube.cols(), cube.bands(), out.display());
        }
        Command::Simulate { config, out } => {
            let config = config.load()?;
            let sensing = build_sensing(&config)?;
            let scene = load_scene(&config)?;
            let frame = simulate(&config, sensing.as_ref(), &scene)?;
            write_frame(&out, &frame, &fingerprint(sensing.as_ref())?)?;
            println!(
                "wrote {} measurements (rate {:.4}, tau {:.4e}) to {}",
                frame.len(),
                config.subsampling_rate(),
                frame.noise_bound,
                out.display()
            );
        }
        Command::Reconstruct {
            config,
            frame,
            out,
            truth,
            telemetry,
            montage,
        } => {
            let config = config.load()?;
            let sensing = build_sensing(&config)?;
            let (frame, recorded) = read_frame(&frame)?;
            let current = fingerprint(sensing.as_ref())?;
            if recorded != current {
                return Err(config_error(
                    "frame was simulated with a different operator than this configuration builds".into(),
                ));
            }
            let result = reconstruct(&config, sensing.as_ref(), &frame)?;
            let template = mscs_core::MSCube::zeros(config.rows, config.cols, config.bands);
            let cube = template.with_values(&result.solution.x)?;
            write_raw_cube(&out, &cube)?;
            if let Some(path) = telemetry {
                let file = fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
                result
                    .solution
                    .telemetry
                    .write_csv(file)
                    .map_err(|e| HarnessError::io(&path, e))?;
            }
            if let Some(path) = montage {
                band_montage(&cube, &path)?;
            }
            println!(
                "{} iterations, converged {}, feasibility gap {:.3e}, objective {:.6e}",
                result.solution.iterations,
                result.solution.converged,
                result.solution.feasibility_gap,
                result.solution.objective
            );
            if let Some(path) = truth {
                let truth = read_raw_cube(&path)?;
                let init = template.with_values(&result.init.x)?;
                println!(
                    "PSNR {:.2} dB (initialization {:.2} dB)",
                    cube_psnr(&cube, &truth)?,
                    cube_psnr(&init, &truth)?
                );
                let bands: Vec<String> = per_band_psnr(&cube, &truth)?.iter().map(|p| format!("{p:.2}")).collect();
                println!("per band: {}", bands.join(" "));
            }
            if !result.solution.converged {
                return Err(HarnessError::NotConverged {
                    iterations: result.solution.iterations,
                });
            }
        }
        Command::Run { config, out_dir } => {
            let config = config.load()?;
            let scene = load_scene(&config)?;
            create_dir(&out_dir)?;
            let outcome = run_on_scene(&config, &scene)?;
            let cube_path = out_dir.join("reconstruction.raw");
            write_raw_cube(&cube_path, &outcome.reconstruction)?;
            band_montage(&outcome.reconstruction, &out_dir.join("reconstruction.png"))?;
            band_montage(&scene, &out_dir.join("truth.png"))?;
            let telemetry_path = out_dir.join("telemetry.csv");
            let file = fs::File::create(&telemetry_path).map_err(|e| HarnessError::io(&telemetry_path, e))?;
            outcome
                .telemetry
                .write_csv(file)
                .map_err(|e| HarnessError::io(&telemetry_path, e))?;
            let report = RunReport {
                output: Some(cube_path),
                ..outcome.report
            };
            write_text(&out_dir.join("report.toml"), &report.to_toml_string())?;
            print_report(&report);
            if !report.converged {
                return Err(HarnessError::NotConverged {
                    iterations: report.iterations,
                });
            }
        }
        Command::Sweep { spec, out_dir } => {
            let text = fs::read_to_string(&spec).map_err(|e| HarnessError::io(&spec, e))?;
            let jobs = SweepSpec::from_toml_str(&text)?.jobs()?;
            create_dir(&out_dir)?;
            let rows = run_sweep(&jobs, |row| match row.psnr {
                Some(p) => println!("{} sample {} rate {:.4}: {p:.2} dB", row.label, row.sample, row.rate),
                None => println!("{} sample {} rate {:.4}: failed: {}", row.label, row.sample, row.rate, row.error),
            });
            let csv_path = out_dir.join("sweep.csv");
            let file = fs::File::create(&csv_path).map_err(|e| HarnessError::io(&csv_path, e))?;
            write_csv(&rows, file)?;
            let points = summarize(&rows);
            let mut summary = String::from("label,rate,mean_psnr,samples\n");
            for p in &points {
                summary.push_str(&format!("{},{},{},{}\n", p.label, p.rate, p.mean_psnr, p.samples));
            }
            write_text(&out_dir.join("summary.csv"), &summary)?;
            plot_curves(&points, &out_dir.join("psnr.png"))?;
            for (label, [r, g, b]) in curve_colors(&points) {
                println!("curve {label}: rgb({r}, {g}, {b})");
            }
            for (lo, hi) in monotonicity_violations(&points, 0.0) {
                println!(
                    "warning: {} drops from {:.2} dB at rate {:.4} to {:.2} dB at rate {:.4}",
                    lo.label, lo.mean_psnr, lo.rate, hi.mean_psnr, hi.rate
                );
            }
        }
        Command::SizingReport { config } => {
            let config = config.load()?;
            if config.architecture != Architecture::Msrc {
                return Err(config_error("sizing applies to the msrc architecture".into()));
            }
            let (aperture_pitch, sensor_pitch, focal) = config
                .optics()
                .unwrap_or((config.aperture_pitch_m, config.sensor_pitch_m, config.focal_length_m));
            let optics = Optics::new(aperture_pitch, sensor_pitch, focal)?;
            let cells = (config.rows + config.sensor_rows - 1, config.cols + config.sensor_cols - 1);
            print!("{}", SizingReport::new(optics, cells, &default_wavelengths(config.bands)));
        }
        Command::Selftest => {
            let checks = run_selftest()?;
            for c in &checks {
                println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if checks.iter().any(|c| !c.passed) {
                return Err(HarnessError::Data("selftest failed".into()));
            }
        }
    }
    Ok(())
}

fn print_report(report: &RunReport) {
    println!("rate {:.4}", report.rate);
    println!("PSNR {:.2} dB (initialization {:.2} dB)", report.psnr, report.init_psnr);
    if let Some(b) = report.baseline_psnr {
        println!("nearest-neighbor demosaicking {b:.2} dB");
    }
    println!(
        "{} iterations, converged {}, {:.1} s",
        report.iterations, report.converged, report.wall_time_s
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
