//! Fabry-Perot filter arrangements on the focal plane array.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutKind {
    /// `period x period` macro-pixel repeated over the sensor.
    Mosaic,
    /// Balanced assignment shuffled over the whole sensor.
    Random,
    /// `period x period` grid of large single-band tiles.
    Tiled,
}

impl std::fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LayoutKind::Mosaic => "mosaic",
            LayoutKind::Random => "random",
            LayoutKind::Tiled => "tiled",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for LayoutKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mosaic" => Ok(LayoutKind::Mosaic),
            "random" => Ok(LayoutKind::Random),
            "tiled" => Ok(LayoutKind::Tiled),
            other => Err(Error::InvalidParameter(format!("unknown layout kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensorLayout {
    band_of_pixel: Array2<usize>,
    kind: LayoutKind,
    period: usize,
    bands: usize,
    seed: Option<u64>,
}

/// Builds a filter layout for a `rows x cols` sensor.
///
/// Random layouts use `ChaCha8Rng` seeded with `seed` to shuffle the balanced
/// assignment `pixel k -> band k mod n_bands` over the full array, so the same
/// seed always reproduces the same map.
pub fn make_layout(
    kind: LayoutKind,
    rows: usize,
    cols: usize,
    bands: usize,
    period: usize,
    seed: u64,
) -> Result<SensorLayout> {
    if rows == 0 || cols == 0 || bands == 0 {
        return Err(Error::InvalidParameter("layout dimensions must be positive".into()));
    }
    let band_of_pixel = match kind {
        LayoutKind::Mosaic => {
            if period == 0 || period * period != bands {
                return Err(Error::InvalidParameter(format!(
                    "mosaic layout needs n_bands = period^2, got {bands} bands with period {period}"
                )));
            }
            Array2::from_shape_fn((rows, cols), |(i, j)| (i % period) * period + j % period)
        }
        LayoutKind::Tiled => {
            if period == 0 || period * period != bands {
                return Err(Error::InvalidParameter(format!(
                    "tiled layout needs n_bands = period^2, got {bands} bands with period {period}"
                )));
            }
            if rows < period || cols < period {
                return Err(Error::InvalidParameter(
                    "tiled layout needs at least one pixel per tile".into(),
                ));
            }
            Array2::from_shape_fn((rows, cols), |(i, j)| {
                (i * period / rows) * period + j * period / cols
            })
        }
        LayoutKind::Random => {
            let mut assignment: Vec<usize> = (0..rows * cols).map(|k| k % bands).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            assignment.shuffle(&mut rng);
            Array2::from_shape_vec((rows, cols), assignment).expect("sized")
        }
    };
    Ok(SensorLayout {
        band_of_pixel,
        kind,
        period,
        bands,
        seed: (kind == LayoutKind::Random).then_some(seed),
    })
}

impl SensorLayout {
    /// Layout from an explicit band map, e.g. read from a calibration grid.
    pub fn from_band_map(band_of_pixel: Array2<usize>, bands: usize) -> Result<Self> {
        if let Some(&b) = band_of_pixel.iter().find(|&&b| b >= bands) {
            return Err(Error::InvalidParameter(format!("band index {b} out of range")));
        }
        Ok(Self {
            band_of_pixel,
            kind: LayoutKind::Random,
            period: 0,
            bands,
            seed: None,
        })
    }

    pub fn kind(&self) -> LayoutKind {
        self.kind
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn rows(&self) -> usize {
        self.band_of_pixel.nrows()
    }

    pub fn cols(&self) -> usize {
        self.band_of_pixel.ncols()
    }

    pub fn band_map(&self) -> &Array2<usize> {
        &self.band_of_pixel
    }

    pub fn band_at(&self, row: usize, col: usize) -> usize {
        self.band_of_pixel[[row, col]]
    }

    /// Indicator array of `M_l`.
    pub fn mask(&self, band: usize) -> Array2<bool> {
        self.band_of_pixel.mapv(|b| b == band)
    }

    /// Row-major pixel indices sampling `band`.
    pub fn pixels_of_band(&self, band: usize) -> Vec<usize> {
        self.band_of_pixel
            .iter()
            .enumerate()
            .filter_map(|(k, &b)| (b == band).then_some(k))
            .collect()
    }

    pub fn band_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.bands];
        for &b in &self.band_of_pixel {
            counts[b] += 1;
        }
        counts
    }

    /// Whitespace-separated integer grid, one sensor row per line.
    pub fn to_text_grid(&self) -> String {
        let mut out = String::new();
        for row in self.band_of_pixel.rows() {
            let line: Vec<String> = row.iter().map(|b| b.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text_grid(text: &str, bands: usize) -> Result<Self> {
        let mut rows = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let row: std::result::Result<Vec<usize>, _> =
                line.split_whitespace().map(str::parse).collect();
            rows.push(row.map_err(|e| Error::InvalidParameter(format!("layout grid: {e}")))?);
        }
        let cols = rows.first().map_or(0, Vec::len);
        if cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("layout grid is ragged or empty".into()));
        }
        let flat: Vec<usize> = rows.concat();
        let map = Array2::from_shape_vec((flat.len() / cols, cols), flat).expect("sized");
        Self::from_band_map(map, bands)
    }
}
