//! Ground-truth cubes: raw binary files, per-band image directories, and a
//! seeded synthetic scene generator.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use mscs_core::cube::default_wavelengths;
use mscs_core::{MSCube, MeasurementFrame};
use ndarray::Array3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{HarnessError, Result};

const RAW_MAGIC: &str = "MSCUBE";

/// Writes `MSCUBE rows cols bands wl_1 ... wl_b\n` followed by little-endian
/// `f32` samples in band-major order.
pub fn write_raw_cube(path: &Path, cube: &MSCube) -> Result<()> {
    let mut out = Vec::with_capacity(64 + 4 * cube.len());
    write!(out, "{RAW_MAGIC} {} {} {}", cube.rows(), cube.cols(), cube.bands()).expect("vec write");
    for w in cube.wavelengths() {
        write!(out, " {w}").expect("vec write");
    }
    out.push(b'\n');
    for v in cube.data().iter() {
        out.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    fs::write(path, out).map_err(|e| HarnessError::io(path, e))
}

pub fn read_raw_cube(path: &Path) -> Result<MSCube> {
    let file = fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut header = String::new();
    reader
        .read_line(&mut header)
        .map_err(|e| HarnessError::io(path, e))?;
    let bad = |what: &str| HarnessError::Data(format!("{}: {what}", path.display()));
    let mut fields = header.split_whitespace();
    if fields.next() != Some(RAW_MAGIC) {
        return Err(bad("missing raw cube header"));
    }
    let mut dim = || -> Result<usize> {
        fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| bad("bad dimensions in header"))
    };
    let (rows, cols, bands) = (dim()?, dim()?, dim()?);
    let wavelengths: Vec<f64> = header
        .split_whitespace()
        .skip(4)
        .map(|f| f.parse().map_err(|_| bad("bad wavelength in header")))
        .collect::<Result<_>>()?;
    if wavelengths.len() != bands {
        return Err(bad("wavelength count does not match bands"));
    }
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| HarnessError::io(path, e))?;
    if bytes.len() != 4 * rows * cols * bands {
        return Err(bad("payload size does not match header"));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    let data = Array3::from_shape_vec((bands, rows, cols), values).expect("sized");
    Ok(MSCube::new(data, wavelengths)?)
}

const FRAME_MAGIC: &str = "MSFRAME";

/// Writes `MSFRAME rows cols snapshots noise_bound fingerprint\n` followed by
/// little-endian `f64` samples, snapshot-major.
pub fn write_frame(path: &Path, frame: &MeasurementFrame, fingerprint: &str) -> Result<()> {
    let first = frame
        .snapshots
        .first()
        .ok_or_else(|| HarnessError::Data("empty measurement frame".into()))?;
    let mut out = Vec::with_capacity(128 + 8 * frame.len());
    writeln!(
        out,
        "{FRAME_MAGIC} {} {} {} {:e} {fingerprint}",
        first.nrows(),
        first.ncols(),
        frame.snapshot_count(),
        frame.noise_bound
    )
    .expect("vec write");
    for v in frame.vectorize() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, out).map_err(|e| HarnessError::io(path, e))
}

/// Reads a frame and the operator fingerprint recorded with it.
pub fn read_frame(path: &Path) -> Result<(MeasurementFrame, String)> {
    let bytes = fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    let bad = |what: &str| HarnessError::Data(format!("{}: {what}", path.display()));
    let split = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| bad("missing frame header"))?;
    let header = std::str::from_utf8(&bytes[..split]).map_err(|_| bad("header is not text"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != FRAME_MAGIC {
        return Err(bad("malformed frame header"));
    }
    let dim = |k: usize| -> Result<usize> { fields[k].parse().map_err(|_| bad("bad dimensions in header")) };
    let (rows, cols, snapshots) = (dim(1)?, dim(2)?, dim(3)?);
    let tau: f64 = fields[4].parse().map_err(|_| bad("bad noise bound"))?;
    let payload = &bytes[split + 1..];
    if payload.len() != 8 * rows * cols * snapshots {
        return Err(bad("payload size does not match header"));
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok((MeasurementFrame::from_vector(&values, rows, cols, tau)?, fields[5].to_owned()))
}

/// Square spatial region of interest in source pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Roi {
    pub center: (usize, usize),
    pub size: usize,
}

/// How a directory of per-band images maps to wavelengths.
#[derive(Debug, Clone, PartialEq)]
pub struct BandDirectory {
    pub dir: PathBuf,
    /// Wavelength of the first image in sorted file-name order (nm).
    pub first_nm: f64,
    pub step_nm: f64,
}

impl BandDirectory {
    /// CAVE convention: 31 images from 400 nm in 10 nm steps.
    pub fn cave(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            first_nm: 400.0,
            step_nm: 10.0,
        }
    }
}

/// Index of the source band nearest to each target wavelength.
pub fn nearest_bands(source_nm: &[f64], target_nm: &[f64]) -> Vec<usize> {
    target_nm
        .iter()
        .map(|t| {
            source_nm
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
                .map(|(i, _)| i)
                .expect("nonempty source")
        })
        .collect()
}

/// Loads the bands nearest to `target_nm`, crops `roi`, averages
/// `downsample x downsample` blocks and scales to `[0, 1]` by bit depth.
pub fn ingest_band_directory(
    source: &BandDirectory,
    target_nm: &[f64],
    roi: Roi,
    downsample: usize,
) -> Result<MSCube> {
    let mut files: Vec<PathBuf> = fs::read_dir(&source.dir)
        .map_err(|e| HarnessError::io(&source.dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("png")))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(HarnessError::Data(format!(
            "{}: no band images",
            source.dir.display()
        )));
    }
    let source_nm: Vec<f64> = (0..files.len())
        .map(|i| source.first_nm + source.step_nm * i as f64)
        .collect();
    let picks = nearest_bands(&source_nm, target_nm);
    if picks.windows(2).any(|w| w[0] == w[1]) {
        return Err(HarnessError::Data(
            "requested wavelengths map to the same source band".into(),
        ));
    }
    let downsample = downsample.max(1);
    if roi.size == 0 || roi.size % downsample != 0 {
        return Err(HarnessError::Data(format!(
            "ROI size {} not divisible by downsampling {downsample}",
            roi.size
        )));
    }
    let out_size = roi.size / downsample;
    let mut data = Array3::zeros((picks.len(), out_size, out_size));
    for (b, &k) in picks.iter().enumerate() {
        let img = image::open(&files[k])?;
        let (w, h) = (img.width() as usize, img.height() as usize);
        let half = roi.size / 2;
        if roi.center.0 < half || roi.center.1 < half
            || roi.center.0 - half + roi.size > h
            || roi.center.1 - half + roi.size > w
        {
            return Err(HarnessError::Data(format!(
                "ROI {roi:?} outside {}x{} image {}",
                h,
                w,
                files[k].display()
            )));
        }
        let (r0, c0) = (roi.center.0 - half, roi.center.1 - half);
        let scale = match img.color() {
            image::ColorType::L8 | image::ColorType::Rgb8 | image::ColorType::Rgba8 => 255.0,
            _ => 65535.0,
        };
        let gray = img.into_luma16();
        let norm = if scale == 255.0 { 65535.0 } else { scale };
        let area = (downsample * downsample) as f64;
        for i in 0..out_size {
            for j in 0..out_size {
                let mut acc = 0.0;
                for a in 0..downsample {
                    for c in 0..downsample {
                        let px = gray.get_pixel(
                            (c0 + j * downsample + c) as u32,
                            (r0 + i * downsample + a) as u32,
                        );
                        acc += px.0[0] as f64 / norm;
                    }
                }
                data[[b, i, j]] = acc / area;
            }
        }
    }
    Ok(MSCube::new(data, target_nm.to_vec())?)
}

/// Piecewise-smooth scene: seeded Voronoi regions, each with its own smooth
/// spectrum and low-frequency shading, rendered at twice the resolution and
/// box-averaged so edges are band-limited.
pub fn synthetic_cube(rows: usize, cols: usize, bands: usize, seed: u64) -> Result<MSCube> {
    if rows == 0 || cols == 0 || bands == 0 {
        return Err(HarnessError::Data("synthetic cube needs positive dimensions".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let regions = 10;
    let sites: Vec<(f64, f64)> = (0..regions)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    let wavelengths = default_wavelengths(bands);
    let (lo, hi) = (wavelengths[0], *wavelengths.last().expect("bands > 0"));
    let span = (hi - lo).max(1.0);
    let spectra: Vec<Vec<f64>> = (0..regions)
        .map(|_| {
            let base = 0.1 + 0.3 * rng.random::<f64>();
            let peak = 0.2 + 0.4 * rng.random::<f64>();
            let center = lo - 0.2 * span + 1.4 * span * rng.random::<f64>();
            let width = (0.2 + 0.4 * rng.random::<f64>()) * span;
            wavelengths
                .iter()
                .map(|l| base + peak * (-0.5 * ((l - center) / width).powi(2)).exp())
                .collect()
        })
        .collect();
    let shading: Vec<[f64; 4]> = (0..regions)
        .map(|_| {
            [
                1.0 + 3.0 * rng.random::<f64>(),
                1.0 + 3.0 * rng.random::<f64>(),
                std::f64::consts::TAU * rng.random::<f64>(),
                std::f64::consts::TAU * rng.random::<f64>(),
            ]
        })
        .collect();
    let fine = 2;
    let mut data = Array3::zeros((bands, rows, cols));
    for i in 0..rows * fine {
        for j in 0..cols * fine {
            let u = (i as f64 + 0.5) / (rows * fine) as f64;
            let v = (j as f64 + 0.5) / (cols * fine) as f64;
            let k = sites
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    let da = (a.1 .0 - u).powi(2) + (a.1 .1 - v).powi(2);
                    let db = (b.1 .0 - u).powi(2) + (b.1 .1 - v).powi(2);
                    da.total_cmp(&db)
                })
                .map(|(k, _)| k)
                .expect("regions > 0");
            let [fu, fv, pu, pv] = shading[k];
            let shade = 0.8 + 0.2 * (fu * u * std::f64::consts::PI + pu).sin()
                * (fv * v * std::f64::consts::PI + pv).cos();
            for (b, s) in spectra[k].iter().enumerate() {
                data[[b, i / fine, j / fine]] += (s * shade).clamp(0.0, 1.0) / (fine * fine) as f64;
            }
        }
    }
    Ok(MSCube::new(data, wavelengths)?)
}
