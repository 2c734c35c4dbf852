use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

/// Orthonormal Daubechies scaling filter with 4 vanishing moments (8 taps).
const DB4_LOWPASS: [f64; 8] = [
    0.230_377_813_308_855_23,
    0.714_846_570_552_541_5,
    0.630_880_767_929_590_4,
    -0.027_983_769_416_983_85,
    -0.187_034_811_718_881_14,
    0.030_841_381_835_986_965,
    0.032_883_011_666_982_945,
    -0.010_597_401_784_997_278,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveletFilter {
    /// 8-tap, 4 vanishing moments.
    Daubechies4,
    Haar,
}

impl WaveletFilter {
    /// Orthonormal scaling filter (sums to √2).
    pub fn lowpass(self) -> Vec<f64> {
        match self {
            WaveletFilter::Daubechies4 => DB4_LOWPASS.to_vec(),
            WaveletFilter::Haar => vec![1.0 / SQRT_2; 2],
        }
    }

    /// Quadrature mirror `g[k] = (-1)^k h[L-1-k]`.
    pub fn highpass(self) -> Vec<f64> {
        let h = self.lowpass();
        let l = h.len();
        (0..l)
            .map(|k| if k % 2 == 0 { h[l - 1 - k] } else { -h[l - 1 - k] })
            .collect()
    }

    pub fn len(self) -> usize {
        self.lowpass().len()
    }
}

/// Filter gain convention for the undecimated transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FilterNormalization {
    /// Orthonormal filters scaled by 1/√2 per axis: a Parseval frame.
    #[default]
    Parseval,
    /// Lowpass summing to one (a trous convention); a scaled tight frame.
    Averaging,
}

impl FilterNormalization {
    /// Gain applied to the orthonormal filters along one axis.
    pub fn axis_gain(self) -> f64 {
        match self {
            FilterNormalization::Parseval => 1.0 / SQRT_2,
            FilterNormalization::Averaging => 0.5,
        }
    }
}

/// Undecimated 2-D wavelet transform with circular boundaries.
///
/// Output holds `3 * levels + 1` images of `rows x cols`: for each level the
/// (row-lowpass col-highpass, row-highpass col-lowpass, highpass-highpass)
/// details, then the final approximation. At level `j` the filter taps are
/// spaced `2^j` apart.
#[derive(Debug, Clone)]
pub struct Udwt2 {
    rows: usize,
    cols: usize,
    levels: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Udwt2 {
    pub fn new(
        filter: WaveletFilter,
        levels: usize,
        rows: usize,
        cols: usize,
        normalization: FilterNormalization,
    ) -> Result<Self> {
        if rows < filter.len() || cols < filter.len() {
            return Err(Error::InvalidParameter(format!(
                "image {rows}x{cols} smaller than the {}-tap filter support",
                filter.len()
            )));
        }
        if levels == 0 {
            return Err(Error::InvalidParameter("at least one wavelet level".into()));
        }
        let g = normalization.axis_gain();
        Ok(Self {
            rows,
            cols,
            levels,
            lo: filter.lowpass().iter().map(|v| v * g).collect(),
            hi: filter.highpass().iter().map(|v| v * g).collect(),
        })
    }

    pub fn bands(&self) -> usize {
        3 * self.levels + 1
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn image_len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn coeff_len(&self) -> usize {
        self.bands() * self.image_len()
    }

    /// Level (0-based) of coefficient band `b`; the approximation reports the
    /// last level.
    pub fn band_level(&self, b: usize) -> usize {
        (b / 3).min(self.levels - 1)
    }

    pub fn forward(&self, img: &[f64], out: &mut [f64]) {
        let n = self.image_len();
        assert_eq!(img.len(), n, "udwt input");
        assert_eq!(out.len(), self.coeff_len(), "udwt output");
        let mut approx = img.to_vec();
        let mut row_lo = vec![0.0; n];
        let mut row_hi = vec![0.0; n];
        for level in 0..self.levels {
            let step = 1 << level;
            filter_rows(&approx, self.cols, &self.lo, step, false, &mut row_lo, false);
            filter_rows(&approx, self.cols, &self.hi, step, false, &mut row_hi, false);
            let base = 3 * level * n;
            let (d, rest) = out[base..].split_at_mut(3 * n);
            let (d0, d12) = d.split_at_mut(n);
            let (d1, d2) = d12.split_at_mut(n);
            filter_cols(&row_lo, self.cols, &self.hi, step, false, d0, false);
            filter_cols(&row_hi, self.cols, &self.lo, step, false, d1, false);
            filter_cols(&row_hi, self.cols, &self.hi, step, false, d2, false);
            if level + 1 == self.levels {
                filter_cols(&row_lo, self.cols, &self.lo, step, false, &mut rest[..n], false);
            } else {
                filter_cols(&row_lo, self.cols, &self.lo, step, false, &mut approx, false);
            }
        }
    }

    pub fn adjoint(&self, coeffs: &[f64], out: &mut [f64]) {
        let n = self.image_len();
        assert_eq!(coeffs.len(), self.coeff_len(), "udwt coefficients");
        assert_eq!(out.len(), n, "udwt adjoint output");
        let mut approx = coeffs[3 * self.levels * n..].to_vec();
        let mut row_lo = vec![0.0; n];
        let mut row_hi = vec![0.0; n];
        for level in (0..self.levels).rev() {
            let step = 1 << level;
            let d = &coeffs[3 * level * n..3 * (level + 1) * n];
            filter_cols(&approx, self.cols, &self.lo, step, true, &mut row_lo, false);
            filter_cols(&d[..n], self.cols, &self.hi, step, true, &mut row_lo, true);
            filter_cols(&d[n..2 * n], self.cols, &self.lo, step, true, &mut row_hi, false);
            filter_cols(&d[2 * n..], self.cols, &self.hi, step, true, &mut row_hi, true);
            filter_rows(&row_lo, self.cols, &self.lo, step, true, &mut approx, false);
            filter_rows(&row_hi, self.cols, &self.hi, step, true, &mut approx, true);
        }
        out.copy_from_slice(&approx);
    }
}

/// Circular filtering along each row: `out[i] = Σ_k f[k] x[i - k*step]`, or
/// the correlation `Σ_k f[k] x[i + k*step]` for the adjoint.
fn filter_rows(
    src: &[f64],
    cols: usize,
    f: &[f64],
    step: usize,
    adjoint: bool,
    dst: &mut [f64],
    accumulate: bool,
) {
    let reach = (f.len() - 1) * step;
    let mut padded = vec![0.0; cols + reach];
    for (row, out) in src.chunks_exact(cols).zip(dst.chunks_exact_mut(cols)) {
        // padded[t] = row[(t - reach) mod cols] for convolution,
        // padded[t] = row[t mod cols] for correlation.
        for (t, p) in padded.iter_mut().enumerate() {
            let idx = if adjoint {
                t % cols
            } else {
                (t + cols * (reach / cols + 1) - reach) % cols
            };
            *p = row[idx];
        }
        if !accumulate {
            out.iter_mut().for_each(|o| *o = 0.0);
        }
        for (k, &fk) in f.iter().enumerate() {
            let shift = if adjoint { k * step } else { reach - k * step };
            for (o, &p) in out.iter_mut().zip(&padded[shift..shift + cols]) {
                *o += fk * p;
            }
        }
    }
}

/// Circular filtering along columns, one whole row at a time.
fn filter_cols(
    src: &[f64],
    cols: usize,
    f: &[f64],
    step: usize,
    adjoint: bool,
    dst: &mut [f64],
    accumulate: bool,
) {
    let rows = src.len() / cols;
    if !accumulate {
        dst.iter_mut().for_each(|o| *o = 0.0);
    }
    for i in 0..rows {
        let out = &mut dst[i * cols..(i + 1) * cols];
        for (k, &fk) in f.iter().enumerate() {
            let off = (k * step) % rows;
            let j = if adjoint {
                (i + off) % rows
            } else {
                (i + rows - off) % rows
            };
            for (o, &s) in out.iter_mut().zip(&src[j * cols..(j + 1) * cols]) {
                *o += fk * s;
            }
        }
    }
}
