use std::sync::Arc;

use super::wavelet::{FilterNormalization, Udwt2, WaveletFilter};
use crate::error::{check_len, Error, Result};
use crate::fourier::{Dct, Dct2d};
use crate::linops::{compose, LinearOperator, OpRef, OperatorKind, Restriction, VStack};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub filter: WaveletFilter,
    pub levels: usize,
    pub normalization: FilterNormalization,
    /// Extra per-subband l1 weights (`3 * levels + 1` entries); empty means 1.
    pub band_weights: Vec<f64>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            filter: WaveletFilter::Daubechies4,
            levels: 3,
            normalization: FilterNormalization::Parseval,
            band_weights: Vec::new(),
        }
    }
}

/// The normalized frame `Ã` for a `rows x cols x bands` cube, with the
/// weights `Ω` kept alongside.
///
/// Coefficients are laid out spectral-coefficient major: index
/// `((k * S + s) * rows + u) * cols + v` for spectral DCT index `k`, spatial
/// subband `s` (`S = 3 * levels + 1`, approximation last) and pixel `(u, v)`.
pub struct AnalysisTransform {
    rows: usize,
    cols: usize,
    bands: usize,
    udwt: Udwt2,
    approx_dct: Dct2d,
    /// Orthonormal DCT-II matrix, `bands x bands`, row-major.
    spectral: Vec<f64>,
    subband_weights: Vec<f64>,
}

impl std::fmt::Debug for AnalysisTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalysisTransform")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("bands", &self.bands)
            .field("subband_weights", &self.subband_weights)
            .finish()
    }
}

impl AnalysisTransform {
    pub fn new(rows: usize, cols: usize, bands: usize, config: &AnalysisConfig) -> Result<Self> {
        if bands == 0 {
            return Err(Error::InvalidParameter("analysis needs at least one band".into()));
        }
        let udwt = Udwt2::new(
            config.filter,
            config.levels,
            rows,
            cols,
            FilterNormalization::Parseval,
        )?;
        let subbands = udwt.bands();
        let user = if config.band_weights.is_empty() {
            vec![1.0; subbands]
        } else {
            check_len("analysis band weights", subbands, config.band_weights.len())?;
            config.band_weights.clone()
        };
        if user.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter("band weights must be positive".into()));
        }
        // Relative gain of the requested filter convention w.r.t. Parseval,
        // accumulated over the filtering stages that produced each subband.
        let ratio = config.normalization.axis_gain() / FilterNormalization::Parseval.axis_gain();
        let subband_weights = (0..subbands)
            .map(|s| {
                let stages = udwt.band_level(s) + 1;
                user[s] * ratio.powi(2 * stages as i32)
            })
            .collect();

        let dct = Dct::new(bands);
        let mut spectral = vec![0.0; bands * bands];
        let mut e = vec![0.0; bands];
        for l in 0..bands {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[l] = 1.0;
            dct.forward(&mut e);
            for k in 0..bands {
                spectral[k * bands + l] = e[k];
            }
        }
        Ok(Self {
            rows,
            cols,
            bands,
            udwt,
            approx_dct: Dct2d::new(rows, cols),
            spectral,
            subband_weights,
        })
    }

    pub fn spatial_subbands(&self) -> usize {
        self.udwt.bands()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    /// Per-subband weights `Ω` with `A = Ω Ã`.
    pub fn tight_frame_weights(&self) -> &[f64] {
        &self.subband_weights
    }

    /// `Ω` expanded to the full coefficient length.
    pub fn omega(&self) -> Vec<f64> {
        let n = self.rows * self.cols;
        let mut w = Vec::with_capacity(self.out_dim());
        for _ in 0..self.bands {
            for &s in &self.subband_weights {
                w.extend(std::iter::repeat_n(s, n));
            }
        }
        w
    }

    /// `A x = Ω Ã x`.
    pub fn analysis_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut c = self.apply(x)?;
        let n = self.rows * self.cols;
        for (chunk, w) in c
            .chunks_exact_mut(n)
            .zip(self.subband_weights.iter().cycle())
        {
            chunk.iter_mut().for_each(|v| *v *= w);
        }
        Ok(c)
    }

    /// Spatial transform `A_uv` of one image (approximation DCT included).
    pub fn spatial_forward(&self, img: &[f64], out: &mut [f64]) {
        let n = self.rows * self.cols;
        self.udwt.forward(img, out);
        let last = self.udwt.bands() - 1;
        self.approx_dct.forward(&mut out[last * n..]);
    }

    pub fn spatial_adjoint(&self, coeffs: &[f64], out: &mut [f64]) {
        let n = self.rows * self.cols;
        let last = self.udwt.bands() - 1;
        let mut c = coeffs.to_vec();
        self.approx_dct.inverse(&mut c[last * n..]);
        self.udwt.adjoint(&c, out);
    }

    fn spectral_mix(&self, src: &[f64], dst: &mut [f64], transpose: bool) {
        let n = self.rows * self.cols;
        let b = self.bands;
        dst.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..b {
            let out = &mut dst[k * n..(k + 1) * n];
            for l in 0..b {
                let d = if transpose {
                    self.spectral[l * b + k]
                } else {
                    self.spectral[k * b + l]
                };
                for (o, &s) in out.iter_mut().zip(&src[l * n..(l + 1) * n]) {
                    *o += d * s;
                }
            }
        }
    }
}

impl LinearOperator for AnalysisTransform {
    fn in_dim(&self) -> usize {
        self.rows * self.cols * self.bands
    }
    fn out_dim(&self) -> usize {
        self.in_dim() * self.udwt.bands()
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Composite
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        crate::linops::assert_shape(self, x.len(), out.len(), false);
        let n = self.rows * self.cols;
        let mut spec = vec![0.0; x.len()];
        self.spectral_mix(x, &mut spec, false);
        let per = self.udwt.coeff_len();
        for (img, chunk) in spec.chunks_exact(n).zip(out.chunks_exact_mut(per)) {
            self.spatial_forward(img, chunk);
        }
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        crate::linops::assert_shape(self, y.len(), out.len(), true);
        let n = self.rows * self.cols;
        let per = self.udwt.coeff_len();
        let mut spec = vec![0.0; out.len()];
        for (chunk, img) in y.chunks_exact(per).zip(spec.chunks_exact_mut(n)) {
            self.spatial_adjoint(chunk, img);
        }
        self.spectral_mix(&spec, out, true);
    }
}

/// `Ā = (Ã R_n ; R_nᶜ)` on the extended variable, with `Ω̄ = bdiag(Ω, 0)`.
pub struct ExtendedAnalysis {
    tight: Arc<AnalysisTransform>,
    stack: VStack,
    omega_bar: Vec<f64>,
}

impl ExtendedAnalysis {
    pub fn new(tight: Arc<AnalysisTransform>, keep: &Restriction) -> Result<Self> {
        check_len("extended analysis", tight.in_dim(), keep.out_dim())?;
        let complement = keep.complement();
        let mut omega_bar = tight.omega();
        omega_bar.resize(omega_bar.len() + complement.out_dim(), 0.0);
        let head: OpRef = Arc::new(compose(tight.clone(), Arc::new(keep.clone()))?);
        let stack = VStack::new(vec![head, Arc::new(complement)])?;
        Ok(Self {
            tight,
            stack,
            omega_bar,
        })
    }

    pub fn transform(&self) -> &Arc<AnalysisTransform> {
        &self.tight
    }

    pub fn omega_bar(&self) -> &[f64] {
        &self.omega_bar
    }

    /// `‖Ω̄ Ā x̄‖₁`.
    pub fn weighted_l1(&self, x_bar: &[f64]) -> Result<f64> {
        let c = self.apply(x_bar)?;
        Ok(weighted_l1(&c, &self.omega_bar))
    }
}

pub(crate) fn weighted_l1(coeffs: &[f64], weights: &[f64]) -> f64 {
    coeffs.iter().zip(weights).map(|(c, w)| (c * w).abs()).sum()
}

impl LinearOperator for ExtendedAnalysis {
    fn in_dim(&self) -> usize {
        self.stack.in_dim()
    }
    fn out_dim(&self) -> usize {
        self.stack.out_dim()
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Composite
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.stack.apply_into(x, out)
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        self.stack.adjoint_into(y, out)
    }
}
