//! Multispectral cubes and sensor measurement frames.
//!
//! A cube is stored band-major: the flat vector visits band `l` outermost,
//! then row `u`, then column `v`. Every operator in the crate consumes and
//! produces vectors in that order.

use ndarray::{Array2, Array3, ArrayView2, Axis};

use crate::error::{check_len, Error, Result};

/// Number of filters on the reference sensor.
pub const DEFAULT_BANDS: usize = 16;
/// Lowest and highest filter center wavelengths (nm).
pub const DEFAULT_SPECTRAL_RANGE: (f64, f64) = (470.0, 620.0);

/// `count` centers uniformly spaced on `[lo, hi]`.
pub fn uniform_wavelengths(count: usize, lo: f64, hi: f64) -> Vec<f64> {
    if count == 1 {
        return vec![0.5 * (lo + hi)];
    }
    let step = (hi - lo) / (count - 1) as f64;
    (0..count).map(|i| lo + step * i as f64).collect()
}

pub fn default_wavelengths(count: usize) -> Vec<f64> {
    uniform_wavelengths(count, DEFAULT_SPECTRAL_RANGE.0, DEFAULT_SPECTRAL_RANGE.1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MSCube {
    /// Shape `(n_bands, rows, cols)`.
    data: Array3<f64>,
    wavelengths: Vec<f64>,
}

impl MSCube {
    pub fn new(data: Array3<f64>, wavelengths: Vec<f64>) -> Result<Self> {
        let (bands, rows, cols) = data.dim();
        if bands == 0 || rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter("cube dimensions must be positive".into()));
        }
        check_len("cube wavelengths", bands, wavelengths.len())?;
        if wavelengths.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "wavelengths must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            data: data.as_standard_layout().into_owned(),
            wavelengths,
        })
    }

    /// Cube with the default 470-620 nm band centers.
    pub fn with_default_wavelengths(data: Array3<f64>) -> Result<Self> {
        let bands = data.dim().0;
        Self::new(data, default_wavelengths(bands))
    }

    pub fn zeros(rows: usize, cols: usize, bands: usize) -> Self {
        Self::with_default_wavelengths(Array3::zeros((bands, rows, cols)))
            .expect("positive dims")
    }

    pub fn rows(&self) -> usize {
        self.data.dim().1
    }

    pub fn cols(&self) -> usize {
        self.data.dim().2
    }

    pub fn bands(&self) -> usize {
        self.data.dim().0
    }

    /// `n = rows * cols * bands`.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn wavelengths(&self) -> &[f64] {
        &self.wavelengths
    }

    pub fn data(&self) -> &Array3<f64> {
        &self.data
    }

    pub fn get(&self, u: usize, v: usize, band: usize) -> f64 {
        self.data[[band, u, v]]
    }

    pub fn band(&self, band: usize) -> ArrayView2<'_, f64> {
        self.data.index_axis(Axis(0), band)
    }

    pub fn vectorize(&self) -> Vec<f64> {
        self.data.iter().copied().collect()
    }

    pub fn devectorize(
        values: &[f64],
        rows: usize,
        cols: usize,
        wavelengths: Vec<f64>,
    ) -> Result<Self> {
        let bands = wavelengths.len();
        check_len("devectorize", rows * cols * bands, values.len())?;
        let data = Array3::from_shape_vec((bands, rows, cols), values.to_vec())
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Self::new(data, wavelengths)
    }

    /// Same geometry, new voxel values.
    pub fn with_values(&self, values: &[f64]) -> Result<Self> {
        Self::devectorize(values, self.rows(), self.cols(), self.wavelengths.clone())
    }
}

/// Raw sensor output, one `rows x cols` frame per snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementFrame {
    pub snapshots: Vec<Array2<f64>>,
    /// Bound on the l2 norm of the additive noise.
    pub noise_bound: f64,
}

impl MeasurementFrame {
    pub fn from_vector(values: &[f64], rows: usize, cols: usize, noise_bound: f64) -> Result<Self> {
        let per = rows * cols;
        if per == 0 || values.len() % per != 0 {
            return Err(Error::DimensionMismatch {
                context: "measurement frame",
                expected: per,
                got: values.len(),
            });
        }
        let snapshots = values
            .chunks_exact(per)
            .map(|c| Array2::from_shape_vec((rows, cols), c.to_vec()).expect("chunk size"))
            .collect();
        Ok(Self {
            snapshots,
            noise_bound,
        })
    }

    pub fn snapshot_count(&self) -> usize {
        self.snapshots.len()
    }

    pub fn rows(&self) -> usize {
        self.snapshots[0].nrows()
    }

    pub fn cols(&self) -> usize {
        self.snapshots[0].ncols()
    }

    /// `m = rows * cols * snapshots`.
    pub fn len(&self) -> usize {
        self.snapshots.iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Snapshot-major, then row-major.
    pub fn vectorize(&self) -> Vec<f64> {
        self.snapshots
            .iter()
            .flat_map(|s| s.iter().copied())
            .collect()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
