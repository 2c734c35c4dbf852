//! Parameter sweeps: PSNR against subsampling rate for several setups,
//! averaged over scene samples.
//!
//! Sweep files are TOML:
//!
//! ```text
//! scenes = ["synthetic", "data/chart.raw"]   # optional, default: base.scene
//!
//! [base]                                     # any experiment keys
//! rows = 128
//! cols = 128
//!
//! [[setup]]
//! label = "msvi-mosaic"
//! architecture = "msvi"                      # overrides for every point
//! points = [{ sensor_rows = 128, sensor_cols = 128 },
//!           { sensor_rows = 256, sensor_cols = 256 }]
//! ```
//!
//! Result CSV columns: `label, architecture, layout, psf, sample, rate, psnr,
//! init_psnr, iterations, converged, error`. `psnr` and `init_psnr` are empty
//! and `error` holds the message when a run fails.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use image::{Rgb, RgbImage};
use mscs_core::{ExperimentConfig, MSCube};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::experiment::run_experiment;

pub const CSV_HEADER: [&str; 11] = [
    "label",
    "architecture",
    "layout",
    "psf",
    "sample",
    "rate",
    "psnr",
    "init_psnr",
    "iterations",
    "converged",
    "error",
];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub scenes: Vec<String>,
    #[serde(default)]
    pub base: toml::Table,
    #[serde(default, rename = "setup")]
    pub setups: Vec<Setup>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Setup {
    pub label: String,
    #[serde(default)]
    pub points: Vec<toml::Table>,
    #[serde(flatten)]
    pub overrides: toml::Table,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepJob {
    pub label: String,
    pub sample: usize,
    pub config: ExperimentConfig,
}

impl SweepSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| mscs_core::Error::Config(e.to_string()).into())
    }

    /// One job per setup point and scene, in file order.
    pub fn jobs(&self) -> Result<Vec<SweepJob>> {
        let mut jobs = Vec::new();
        for setup in &self.setups {
            let points = if setup.points.is_empty() {
                vec![toml::Table::new()]
            } else {
                setup.points.clone()
            };
            for point in &points {
                let mut table = self.base.clone();
                table.extend(setup.overrides.clone());
                table.extend(point.clone());
                let base: ExperimentConfig = toml::Value::Table(table)
                    .try_into()
                    .map_err(|e: toml::de::Error| {
                        mscs_core::Error::Config(format!("setup {}: {e}", setup.label))
                    })?;
                base.validate()?;
                let scenes = if self.scenes.is_empty() {
                    vec![base.scene.clone()]
                } else {
                    self.scenes.clone()
                };
                for (sample, scene) in scenes.into_iter().enumerate() {
                    jobs.push(SweepJob {
                        label: setup.label.clone(),
                        sample,
                        config: ExperimentConfig { scene, ..base.clone() },
                    });
                }
            }
        }
        Ok(jobs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub label: String,
    pub architecture: String,
    pub layout: String,
    pub psf: String,
    pub sample: usize,
    pub rate: f64,
    pub psnr: Option<f64>,
    pub init_psnr: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub error: String,
}

/// Runs every job in order; failures become rows with an error message.
pub fn run_sweep(jobs: &[SweepJob], mut progress: impl FnMut(&SweepRow)) -> Vec<SweepRow> {
    jobs.iter()
        .map(|job| {
            let cfg = &job.config;
            let mut row = SweepRow {
                label: job.label.clone(),
                architecture: cfg.architecture.to_string(),
                layout: cfg.layout.to_string(),
                psf: cfg.psf.to_string(),
                sample: job.sample,
                rate: cfg.subsampling_rate(),
                psnr: None,
                init_psnr: None,
                iterations: 0,
                converged: false,
                error: String::new(),
            };
            match run_experiment(cfg) {
                Ok(outcome) => {
                    row.psnr = Some(outcome.report.psnr);
                    row.init_psnr = Some(outcome.report.init_psnr);
                    row.iterations = outcome.report.iterations;
                    row.converged = outcome.report.converged;
                }
                Err(e) => row.error = e.to_string(),
            }
            progress(&row);
            row
        })
        .collect()
}

pub fn write_csv(rows: &[SweepRow], out: impl Write) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(|e| HarnessError::io("<csv>", e))?;
    Ok(())
}

pub fn read_csv(input: impl Read) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(HarnessError::Data(format!("unexpected sweep CSV header {header:?}")));
    }
    Ok(reader.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub label: String,
    pub rate: f64,
    pub mean_psnr: f64,
    pub samples: usize,
}

/// Mean PSNR per (label, rate) over successful rows, sorted by label then rate.
pub fn summarize(rows: &[SweepRow]) -> Vec<CurvePoint> {
    let mut groups: BTreeMap<(String, u64), (f64, usize)> = BTreeMap::new();
    for row in rows {
        if let Some(p) = row.psnr {
            let entry = groups.entry((row.label.clone(), row.rate.to_bits())).or_default();
            entry.0 += p;
            entry.1 += 1;
        }
    }
    let mut points: Vec<CurvePoint> = groups
        .into_iter()
        .map(|((label, bits), (sum, n))| CurvePoint {
            label,
            rate: f64::from_bits(bits),
            mean_psnr: sum / n as f64,
            samples: n,
        })
        .collect();
    points.sort_by(|a, b| a.label.cmp(&b.label).then(a.rate.total_cmp(&b.rate)));
    points
}

/// Consecutive points of one curve where PSNR drops by more than `slack` dB
/// as the rate increases.
pub fn monotonicity_violations(points: &[CurvePoint], slack: f64) -> Vec<(CurvePoint, CurvePoint)> {
    points
        .windows(2)
        .filter(|w| w[0].label == w[1].label && w[1].mean_psnr < w[0].mean_psnr - slack)
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect()
}

const PALETTE: [[u8; 3]; 8] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [127, 127, 127],
];

/// Curve colors in label order, matching [`plot_curves`].
pub fn curve_colors(points: &[CurvePoint]) -> Vec<(String, [u8; 3])> {
    let mut labels: Vec<&str> = points.iter().map(|p| p.label.as_str()).collect();
    labels.dedup();
    labels
        .into_iter()
        .enumerate()
        .map(|(k, l)| (l.to_owned(), PALETTE[k % PALETTE.len()]))
        .collect()
}

fn draw_line(img: &mut RgbImage, a: (i64, i64), b: (i64, i64), color: Rgb<u8>) {
    let steps = (b.0 - a.0).abs().max((b.1 - a.1).abs()).max(1);
    for s in 0..=steps {
        let x = a.0 + (b.0 - a.0) * s / steps;
        let y = a.1 + (b.1 - a.1) * s / steps;
        for (dx, dy) in [(0, 0), (1, 0), (0, 1)] {
            let (px, py) = (x + dx, y + dy);
            if px >= 0 && py >= 0 && (px as u32) < img.width() && (py as u32) < img.height() {
                img.put_pixel(px as u32, py as u32, color);
            }
        }
    }
}

/// PSNR against log2(rate), one colored polyline per label with 5 dB grid
/// lines and a color key in the top-left corner.
pub fn plot_curves(points: &[CurvePoint], path: &Path) -> Result<()> {
    let (w, h, margin) = (640i64, 480i64, 40i64);
    let mut img = RgbImage::from_pixel(w as u32, h as u32, Rgb([255, 255, 255]));
    if !points.is_empty() {
        let xs: Vec<f64> = points.iter().map(|p| p.rate.log2()).collect();
        let (x0, x1) = xs.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        let lo = (points.iter().map(|p| p.mean_psnr).fold(f64::MAX, f64::min) / 5.0).floor() * 5.0;
        let hi = (points.iter().map(|p| p.mean_psnr).fold(f64::MIN, f64::max) / 5.0).ceil() * 5.0;
        let hi = if hi > lo { hi } else { lo + 5.0 };
        let span_x = if x1 > x0 { x1 - x0 } else { 1.0 };
        let to_px = |x: f64, p: f64| -> (i64, i64) {
            let u = margin + ((x - x0) / span_x * (w - 2 * margin) as f64).round() as i64;
            let v = h - margin - ((p - lo) / (hi - lo) * (h - 2 * margin) as f64).round() as i64;
            (u, v)
        };
        let grid = Rgb([225, 225, 225]);
        let mut level = lo;
        while level <= hi + 1e-9 {
            let y = to_px(x0, level).1;
            draw_line(&mut img, (margin, y), (w - margin, y), grid);
            level += 5.0;
        }
        let axis = Rgb([0, 0, 0]);
        draw_line(&mut img, (margin, h - margin), (w - margin, h - margin), axis);
        draw_line(&mut img, (margin, margin), (margin, h - margin), axis);
        for (k, (label, color)) in curve_colors(points).into_iter().enumerate() {
            let color = Rgb(color);
            let curve: Vec<(i64, i64)> = points
                .iter()
                .filter(|p| p.label == label)
                .map(|p| to_px(p.rate.log2(), p.mean_psnr))
                .collect();
            for seg in curve.windows(2) {
                draw_line(&mut img, seg[0], seg[1], color);
            }
            for &(x, y) in &curve {
                for d in -3..=3 {
                    draw_line(&mut img, (x - 3, y + d), (x + 3, y + d), color);
                }
            }
            let key_y = 8 + 12 * k as i64;
            for d in 0..8 {
                draw_line(&mut img, (8, key_y + d), (24, key_y + d), color);
            }
        }
    }
    img.save(path)?;
    Ok(())
}

/// All bands side by side in a near-square grid, values clipped to [0, 1].
pub fn band_montage(cube: &MSCube, path: &Path) -> Result<()> {
    let bands = cube.bands();
    let grid_cols = (bands as f64).sqrt().ceil() as usize;
    let grid_rows = bands.div_ceil(grid_cols);
    let gap = 2;
    let (r, c) = (cube.rows(), cube.cols());
    let width = grid_cols * (c + gap) - gap;
    let height = grid_rows * (r + gap) - gap;
    let mut img = image::GrayImage::from_pixel(width as u32, height as u32, image::Luma([255]));
    for b in 0..bands {
        let (oi, oj) = ((b / grid_cols) * (r + gap), (b % grid_cols) * (c + gap));
        for ((i, j), v) in cube.band(b).indexed_iter() {
            let level = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
            img.put_pixel((oj + j) as u32, (oi + i) as u32, image::Luma([level]));
        }
    }
    img.save(path)?;
    Ok(())
}
