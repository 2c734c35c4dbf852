use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Orthonormal DCT-II of a fixed length, computed with one complex FFT
/// (even/odd reordering). The inverse is the orthonormal DCT-III, which is
/// also the adjoint.
pub struct Dct {
    len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// `exp(-i pi k / 2N)`.
    twiddles: Vec<Complex64>,
}

impl std::fmt::Debug for Dct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Dct({})", self.len)
    }
}

impl Dct {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "dct length");
        let mut planner = FftPlanner::new();
        let twiddles = (0..len)
            .map(|k| Complex64::from_polar(1.0, -PI * k as f64 / (2 * len) as f64))
            .collect();
        Self {
            len,
            fwd: planner.plan_fft_forward(len),
            inv: planner.plan_fft_inverse(len),
            twiddles,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn scale(&self, k: usize) -> f64 {
        let n = self.len as f64;
        if k == 0 {
            (1.0 / n).sqrt()
        } else {
            (2.0 / n).sqrt()
        }
    }

    pub fn forward(&self, x: &mut [f64]) {
        let n = self.len;
        assert_eq!(x.len(), n, "dct length");
        let mut v = vec![Complex64::default(); n];
        for k in 0..n.div_ceil(2) {
            v[k] = Complex64::new(x[2 * k], 0.0);
        }
        for k in 0..n / 2 {
            v[n - 1 - k] = Complex64::new(x[2 * k + 1], 0.0);
        }
        self.fwd.process(&mut v);
        for k in 0..n {
            x[k] = (v[k] * self.twiddles[k]).re * self.scale(k);
        }
    }

    pub fn inverse(&self, x: &mut [f64]) {
        let n = self.len;
        assert_eq!(x.len(), n, "dct length");
        let c: Vec<f64> = (0..n).map(|k| x[k] / self.scale(k)).collect();
        let mut v: Vec<Complex64> = (0..n)
            .map(|k| {
                let tail = if k == 0 { 0.0 } else { c[n - k] };
                self.twiddles[k].conj() * Complex64::new(c[k], -tail)
            })
            .collect();
        self.inv.process(&mut v);
        let inv_n = 1.0 / n as f64;
        for k in 0..n.div_ceil(2) {
            x[2 * k] = v[k].re * inv_n;
        }
        for k in 0..n / 2 {
            x[2 * k + 1] = v[n - 1 - k].re * inv_n;
        }
    }
}

/// Separable orthonormal 2-D DCT-II on row-major images.
#[derive(Debug)]
pub struct Dct2d {
    rows: usize,
    cols: usize,
    row: Dct,
    col: Dct,
}

impl Dct2d {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row: Dct::new(cols),
            col: Dct::new(rows),
        }
    }

    pub fn forward(&self, img: &mut [f64]) {
        self.separable(img, false)
    }

    pub fn inverse(&self, img: &mut [f64]) {
        self.separable(img, true)
    }

    fn separable(&self, img: &mut [f64], inverse: bool) {
        assert_eq!(img.len(), self.rows * self.cols, "dct image size");
        let run = |d: &Dct, s: &mut [f64]| if inverse { d.inverse(s) } else { d.forward(s) };
        for r in img.chunks_exact_mut(self.cols) {
            run(&self.row, r);
        }
        let mut col = vec![0.0; self.rows];
        for j in 0..self.cols {
            for i in 0..self.rows {
                col[i] = img[i * self.cols + j];
            }
            run(&self.col, &mut col);
            for i in 0..self.rows {
                img[i * self.cols + j] = col[i];
            }
        }
    }
}
