//! Experiment configuration, stored as a flat TOML key-value file.
//!
//! ```text
//! architecture = "msvi"        # "msvi" | "msrc"
//! layout = "mosaic"            # "mosaic" | "random" | "tiled"
//! period = 4
//! rows = 128                   # target cube
//! cols = 128
//! bands = 16
//! sensor_rows = 256
//! sensor_cols = 256
//! snapshots = 1                # MSRC only
//! snr_db = 40.0
//! psf = "none"                 # "none" | "5px" | "11px" | "custom"
//! aperture_pitch_m = 80e-6     # custom psf only
//! sensor_pitch_m = 55e-6
//! focal_length_m = 40e-3
//! rho = 40.0
//! mu1_scale = 50.0
//! max_iter = 2000
//! tol = 5e-5
//! x_min = 0.0
//! x_max = 1.0
//! scene = "synthetic"          # or a path to a raw cube
//! scene_seed = 1
//! layout_seed = 1
//! aperture_seed = 2
//! noise_seed = 3
//! ```
//!
//! Every key is optional; missing keys take the defaults above.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::LayoutKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    Msvi,
    Msrc,
}

impl std::fmt::Display for Architecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Architecture::Msvi => "msvi",
            Architecture::Msrc => "msrc",
        })
    }
}

/// Diffraction model applied to the coded aperture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PsfMode {
    #[serde(rename = "none")]
    None,
    /// 110 um effective sensor pitch: 5 px wide at 620 nm.
    #[serde(rename = "5px")]
    Px5,
    /// 55 um effective sensor pitch: 11 px wide at 620 nm.
    #[serde(rename = "11px")]
    Px11,
    /// Explicit optics from the `*_m` keys.
    #[serde(rename = "custom")]
    Custom,
}

impl std::fmt::Display for PsfMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PsfMode::None => "none",
            PsfMode::Px5 => "5px",
            PsfMode::Px11 => "11px",
            PsfMode::Custom => "custom",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub architecture: Architecture,
    pub layout: LayoutKind,
    pub period: usize,
    pub rows: usize,
    pub cols: usize,
    pub bands: usize,
    pub sensor_rows: usize,
    pub sensor_cols: usize,
    pub snapshots: usize,
    pub snr_db: f64,
    pub psf: PsfMode,
    pub aperture_pitch_m: f64,
    pub sensor_pitch_m: f64,
    pub focal_length_m: f64,
    pub rho: f64,
    pub mu1_scale: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub scene: String,
    pub scene_seed: u64,
    pub layout_seed: u64,
    pub aperture_seed: u64,
    pub noise_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            architecture: Architecture::Msvi,
            layout: LayoutKind::Mosaic,
            period: 4,
            rows: 256,
            cols: 256,
            bands: 16,
            sensor_rows: 512,
            sensor_cols: 512,
            snapshots: 1,
            snr_db: 40.0,
            psf: PsfMode::None,
            aperture_pitch_m: 80e-6,
            sensor_pitch_m: 55e-6,
            focal_length_m: 40e-3,
            rho: 40.0,
            mu1_scale: 50.0,
            max_iter: 2000,
            tol: 5e-5,
            x_min: 0.0,
            x_max: 1.0,
            scene: "synthetic".into(),
            scene_seed: 1,
            layout_seed: 1,
            aperture_seed: 2,
            noise_seed: 3,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let dims = [
            ("rows", self.rows),
            ("cols", self.cols),
            ("bands", self.bands),
            ("sensor_rows", self.sensor_rows),
            ("sensor_cols", self.sensor_cols),
            ("snapshots", self.snapshots),
            ("max_iter", self.max_iter),
        ];
        if let Some((name, _)) = dims.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be positive")));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::Config("snr_db must be finite".into()));
        }
        if !(self.x_min < self.x_max) {
            return Err(Error::Config("x_min must be below x_max".into()));
        }
        if !(self.rho > 0.0 && self.mu1_scale > 0.0 && self.tol > 0.0) {
            return Err(Error::Config("rho, mu1_scale and tol must be positive".into()));
        }
        let optics = [self.aperture_pitch_m, self.sensor_pitch_m, self.focal_length_m];
        if optics.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(Error::Config("optical parameters must be positive".into()));
        }
        if self.architecture == Architecture::Msvi
            && (self.sensor_rows < self.rows || self.sensor_cols < self.cols)
        {
            return Err(Error::Config(
                "MSVI sensor must be at least as large as the target cube".into(),
            ));
        }
        Ok(())
    }

    /// Optical parameters `(aperture pitch, sensor pitch, focal length)` of the
    /// configured PSF mode, `None` when diffraction is not modeled.
    pub fn optics(&self) -> Option<(f64, f64, f64)> {
        match self.psf {
            PsfMode::None => None,
            PsfMode::Px5 => Some((80e-6, 110e-6, 40e-3)),
            PsfMode::Px11 => Some((80e-6, 55e-6, 40e-3)),
            PsfMode::Custom => Some((self.aperture_pitch_m, self.sensor_pitch_m, self.focal_length_m)),
        }
    }

    /// Measurements over voxels.
    pub fn subsampling_rate(&self) -> f64 {
        let m = self.sensor_rows * self.sensor_cols * match self.architecture {
            Architecture::Msvi => 1,
            Architecture::Msrc => self.snapshots,
        };
        m as f64 / (self.rows * self.cols * self.bands) as f64
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }
}
