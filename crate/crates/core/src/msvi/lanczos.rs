use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linops::{assert_shape, LinearOperator, OperatorKind};

pub const LANCZOS_ORDER: usize = 3;

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else if x.fract() == 0.0 {
        0.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

fn lanczos(x: f64, a: f64) -> f64 {
    if x.abs() >= a {
        0.0
    } else {
        sinc(x) * sinc(x / a)
    }
}

/// One-axis resampling from `src` to `dst` samples, stored as sparse rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Resampler1d {
    src: usize,
    dst: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl Resampler1d {
    /// Lanczos interpolation with pixel-center alignment
    /// (`t = (i + 0.5) * src / dst - 0.5`) and edge clamping.
    ///
    /// Each row is normalized to sum to one and then minimally corrected so
    /// its first moment about `t` vanishes, so constants and ramps are reproduced away
    /// from the borders.
    pub fn lanczos(src: usize, dst: usize, order: usize) -> Result<Self> {
        if src == 0 || dst == 0 || order == 0 {
            return Err(Error::InvalidParameter("resampler sizes must be positive".into()));
        }
        let a = order as f64;
        let scale = src as f64 / dst as f64;
        let rows = (0..dst)
            .map(|i| {
                let t = (i as f64 + 0.5) * scale - 0.5;
                let base = t.floor() as i64;
                let mut taps: Vec<(i64, f64)> = (base - order as i64 + 1..=base + order as i64)
                    .map(|j| (j, lanczos(t - j as f64, a)))
                    .filter(|&(_, w)| w != 0.0)
                    .collect();
                let total: f64 = taps.iter().map(|&(_, w)| w).sum();
                taps.iter_mut().for_each(|(_, w)| *w /= total);
                let mean: f64 = taps.iter().map(|&(j, w)| w * (j as f64 - t)).sum();
                if mean != 0.0 {
                    // Smallest additive change `α + γ d` that zeroes the first
                    // moment while keeping the sum.
                    let k = taps.len() as f64;
                    let s1: f64 = taps.iter().map(|&(j, _)| j as f64 - t).sum();
                    let s2: f64 = taps.iter().map(|&(j, _)| (j as f64 - t).powi(2)).sum();
                    let det = k * s2 - s1 * s1;
                    if det > 0.0 {
                        let gamma = -mean * k / det;
                        let alpha = -gamma * s1 / k;
                        for (j, w) in taps.iter_mut() {
                            *w += alpha + gamma * (*j as f64 - t);
                        }
                    }
                }
                let mut row: Vec<(usize, f64)> = Vec::with_capacity(taps.len());
                for (j, w) in taps {
                    let k = j.clamp(0, src as i64 - 1) as usize;
                    match row.iter_mut().find(|(idx, _)| *idx == k) {
                        Some(entry) => entry.1 += w,
                        None => row.push((k, w)),
                    }
                }
                row
            })
            .collect();
        Ok(Self { src, dst, rows })
    }

    pub fn src_len(&self) -> usize {
        self.src
    }

    pub fn dst_len(&self) -> usize {
        self.dst
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// `R* R` as a dense `src x src` matrix.
    pub fn gram(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.src, self.src);
        for row in &self.rows {
            for &(a, wa) in row {
                for &(b, wb) in row {
                    g[(a, b)] += wa * wb;
                }
            }
        }
        g
    }
}

/// Separable 2-D upsampling `Up`, applied to one `rows x cols` band.
#[derive(Debug, Clone)]
pub struct UpsamplingOperator {
    along_rows: Resampler1d,
    along_cols: Resampler1d,
    /// Eigen-decompositions of the per-axis Gram matrices, for the normal inverse.
    row_eigen: SymmetricEigen<f64, nalgebra::Dyn>,
    col_eigen: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl UpsamplingOperator {
    pub fn new(src: (usize, usize), dst: (usize, usize)) -> Result<Self> {
        Self::with_order(src, dst, LANCZOS_ORDER)
    }

    pub fn with_order(src: (usize, usize), dst: (usize, usize), order: usize) -> Result<Self> {
        if dst.0 < src.0 || dst.1 < src.1 {
            return Err(Error::InvalidParameter(format!(
                "upsampling target {dst:?} smaller than source {src:?}"
            )));
        }
        let along_rows = Resampler1d::lanczos(src.0, dst.0, order)?;
        let along_cols = Resampler1d::lanczos(src.1, dst.1, order)?;
        let row_eigen = SymmetricEigen::new(along_rows.gram());
        let col_eigen = SymmetricEigen::new(along_cols.gram());
        Ok(Self {
            along_rows,
            along_cols,
            row_eigen,
            col_eigen,
        })
    }

    pub fn src_dims(&self) -> (usize, usize) {
        (self.along_rows.src_len(), self.along_cols.src_len())
    }

    pub fn dst_dims(&self) -> (usize, usize) {
        (self.along_rows.dst_len(), self.along_cols.dst_len())
    }

    pub fn is_identity(&self) -> bool {
        self.src_dims() == self.dst_dims()
    }

    pub fn axes(&self) -> (&Resampler1d, &Resampler1d) {
        (&self.along_rows, &self.along_cols)
    }

    /// `(Up* Up + mu Id)^-1 v` for one band, exact through the separable
    /// eigen-decomposition `Up* Up = (Q_r ⊗ Q_c)(Λ_r ⊗ Λ_c)(Q_r ⊗ Q_c)ᵀ`.
    pub fn normal_inverse_band(&self, v: &[f64], mu: f64, out: &mut [f64]) {
        let (r, c) = self.src_dims();
        assert_eq!(v.len(), r * c, "normal inverse input");
        if self.is_identity() {
            let s = 1.0 / (1.0 + mu);
            out.iter_mut().zip(v).for_each(|(o, x)| *o = x * s);
            return;
        }
        let vm = DMatrix::from_row_slice(r, c, v);
        let qr = &self.row_eigen.eigenvectors;
        let qc = &self.col_eigen.eigenvectors;
        let mut t = qr.transpose() * vm * qc;
        for i in 0..r {
            for j in 0..c {
                t[(i, j)] /= self.row_eigen.eigenvalues[i] * self.col_eigen.eigenvalues[j] + mu;
            }
        }
        let z = qr * t * qc.transpose();
        for i in 0..r {
            for j in 0..c {
                out[i * c + j] = z[(i, j)];
            }
        }
    }
}

impl LinearOperator for UpsamplingOperator {
    fn in_dim(&self) -> usize {
        let (r, c) = self.src_dims();
        r * c
    }
    fn out_dim(&self) -> usize {
        let (r, c) = self.dst_dims();
        r * c
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Composite
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        assert_shape(self, x.len(), out.len(), false);
        let (_, sc) = self.src_dims();
        let (dr, dc) = self.dst_dims();
        let mut tmp = vec![0.0; dr * sc];
        for i in 0..dr {
            let t = &mut tmp[i * sc..(i + 1) * sc];
            for &(j, w) in self.along_rows.row(i) {
                for (o, &s) in t.iter_mut().zip(&x[j * sc..(j + 1) * sc]) {
                    *o += w * s;
                }
            }
        }
        for i in 0..dr {
            let src = &tmp[i * sc..(i + 1) * sc];
            let dst = &mut out[i * dc..(i + 1) * dc];
            for (k, o) in dst.iter_mut().enumerate() {
                *o = self.along_cols.row(k).iter().map(|&(l, w)| w * src[l]).sum();
            }
        }
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        assert_shape(self, y.len(), out.len(), true);
        let (_, sc) = self.src_dims();
        let (dr, dc) = self.dst_dims();
        let mut tmp = vec![0.0; dr * sc];
        for i in 0..dr {
            let src = &y[i * dc..(i + 1) * dc];
            let t = &mut tmp[i * sc..(i + 1) * sc];
            for (k, &yv) in src.iter().enumerate() {
                for &(l, w) in self.along_cols.row(k) {
                    t[l] += w * yv;
                }
            }
        }
        out.iter_mut().for_each(|o| *o = 0.0);
        for i in 0..dr {
            let t = &tmp[i * sc..(i + 1) * sc];
            for &(j, w) in self.along_rows.row(i) {
                for (o, &s) in out[j * sc..(j + 1) * sc].iter_mut().zip(t) {
                    *o += w * s;
                }
            }
        }
    }
}
