use ndarray::Array2;
use rustfft::num_complex::Complex64;

use super::aperture::CodedAperture;
use super::diffraction::{diffract_pattern, DiffractionKernel};
use crate::config::Architecture;
use crate::cube::{norm2, MSCube, MeasurementFrame};
use crate::error::{check_len, Error, Result};
use crate::fourier::Fft2;
use crate::layout::SensorLayout;
use crate::linops::{assert_shape, LinearOperator, OperatorKind, Restriction};
use crate::sensing::ExtendedSensing;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Spectra of two real signals from one complex FFT of `a + i b`.
fn forward_pair(fft: &Fft2, a: &[f64], b: Option<&[f64]>) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut z: Vec<Complex64> = match b {
        Some(b) => a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect(),
        None => a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    };
    fft.forward(&mut z);
    if b.is_none() {
        return (z, Vec::new());
    }
    let (rows, cols) = (fft.rows(), fft.cols());
    let mut fa = vec![ZERO; z.len()];
    let mut fb = vec![ZERO; z.len()];
    for i in 0..rows {
        let ni = (rows - i) % rows;
        for j in 0..cols {
            let nj = (cols - j) % cols;
            let zk = z[i * cols + j];
            let zc = z[ni * cols + nj].conj();
            fa[i * cols + j] = (zk + zc) * 0.5;
            fb[i * cols + j] = (zk - zc) * Complex64::new(0.0, -0.5);
        }
    }
    (fa, fb)
}

/// Real inverse transforms (normalized) of two Hermitian spectra at once.
fn inverse_pair(fft: &Fft2, a: &[Complex64], b: Option<&[Complex64]>, out_a: &mut [f64], out_b: &mut [f64]) {
    let mut z: Vec<Complex64> = match b {
        Some(b) => a.iter().zip(b).map(|(x, y)| x + Complex64::new(-y.im, y.re)).collect(),
        None => a.to_vec(),
    };
    fft.inverse(&mut z);
    let scale = 1.0 / z.len() as f64;
    for (o, v) in out_a.iter_mut().zip(&z) {
        *o = v.re * scale;
    }
    if b.is_some() {
        for (o, v) in out_b.iter_mut().zip(&z) {
            *o = v.im * scale;
        }
    }
}

/// Forward transforms of many real signals, paired two per FFT.
fn forward_many(fft: &Fft2, signals: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(signals.len());
    for pair in signals.chunks(2) {
        let (a, b) = forward_pair(fft, pair[0], pair.get(1).copied());
        out.push(a);
        if pair.len() == 2 {
            out.push(b);
        }
    }
    out
}

/// Inverse transforms of many Hermitian spectra into consecutive real blocks.
fn inverse_many(fft: &Fft2, spectra: &[Vec<Complex64>], out: &mut [f64]) {
    let n = fft.len();
    for (pair, chunk) in spectra.chunks(2).zip(out.chunks_mut(2 * n)) {
        let (oa, ob) = chunk.split_at_mut(n);
        inverse_pair(fft, &pair[0], pair.get(1).map(|v| v.as_slice()), oa, ob);
    }
}

/// `Φ̄ = bdiag` of per-(snapshot, band) circular convolutions, diagonalized by
/// the 2-D DFT on the aperture grid. Input `[band][s_u][s_v]`, output
/// `[snapshot][band][s_u][s_v]`.
pub struct MsrcPhiBar {
    fft: Fft2,
    bands: usize,
    snapshots: usize,
    /// `Σ_{p,ℓ}` at index `p * bands + ℓ`.
    spectra: Vec<Vec<Complex64>>,
}

impl LinearOperator for MsrcPhiBar {
    fn in_dim(&self) -> usize {
        self.bands * self.fft.len()
    }
    fn out_dim(&self) -> usize {
        self.snapshots * self.bands * self.fft.len()
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::DftDiagonalized
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        assert_shape(self, x.len(), out.len(), false);
        let n = self.fft.len();
        let inputs: Vec<&[f64]> = x.chunks_exact(n).collect();
        let xs = forward_many(&self.fft, &inputs);
        let products: Vec<Vec<Complex64>> = (0..self.snapshots * self.bands)
            .map(|k| {
                let xh = &xs[k % self.bands];
                self.spectra[k].iter().zip(xh).map(|(s, v)| s * v).collect()
            })
            .collect();
        inverse_many(&self.fft, &products, out);
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        assert_shape(self, y.len(), out.len(), true);
        let n = self.fft.len();
        let inputs: Vec<&[f64]> = y.chunks_exact(n).collect();
        let ys = forward_many(&self.fft, &inputs);
        let mut acc = vec![vec![ZERO; n]; self.bands];
        for (k, yh) in ys.iter().enumerate() {
            for ((a, s), v) in acc[k % self.bands].iter_mut().zip(&self.spectra[k]).zip(yh) {
                *a += s.conj() * v;
            }
        }
        inverse_many(&self.fft, &acc, out);
    }
}

/// Out-of-focus coded-aperture sensing with optional per-band diffraction.
pub struct MsrcOperator {
    layout: SensorLayout,
    cube: (usize, usize),
    aperture: CodedAperture,
    kernels: Option<Vec<DiffractionKernel>>,
    phi_bar: MsrcPhiBar,
    /// `Σ_p |Σ_{p,ℓ}|²` per band.
    gram: Vec<Vec<f64>>,
    r_m: Restriction,
    r_n: Restriction,
}

impl MsrcOperator {
    /// `kernels`, when given, holds one diffraction kernel per band.
    pub fn new(
        layout: SensorLayout,
        cube: (usize, usize),
        aperture: CodedAperture,
        kernels: Option<Vec<DiffractionKernel>>,
    ) -> Result<Self> {
        let bands = layout.bands();
        let (mu, mv) = (layout.rows(), layout.cols());
        let (su, sv) = aperture.shape();
        if cube.0 == 0 || cube.1 == 0 || (su, sv) != (cube.0 + mu - 1, cube.1 + mv - 1) {
            return Err(Error::InvalidParameter(format!(
                "aperture {su}x{sv} does not match cube {cube:?} and sensor {mu}x{mv}"
            )));
        }
        if let Some(k) = &kernels {
            if k.len() != bands {
                return Err(Error::DimensionMismatch {
                    context: "diffraction kernels",
                    expected: bands,
                    got: k.len(),
                });
            }
        }
        let fft = Fft2::new(su, sv);
        let snapshots = aperture.snapshots();
        let mut spectra = Vec::with_capacity(snapshots * bands);
        for p in 0..snapshots {
            let patterns: Vec<Array2<f64>> = match &kernels {
                Some(ks) => ks.iter().map(|k| diffract_pattern(aperture.pattern(p), k)).collect(),
                None => vec![aperture.pattern(p).as_standard_layout().into_owned()],
            };
            let slices: Vec<&[f64]> = patterns
                .iter()
                .map(|a| a.as_slice().expect("standard layout"))
                .collect();
            let transformed = forward_many(&fft, &slices);
            if kernels.is_some() {
                spectra.extend(transformed);
            } else {
                spectra.extend(std::iter::repeat_n(transformed[0].clone(), bands));
            }
        }
        let gram = (0..bands)
            .map(|l| {
                let mut g = vec![0.0; su * sv];
                for p in 0..snapshots {
                    for (gk, s) in g.iter_mut().zip(&spectra[p * bands + l]) {
                        *gk += s.norm_sqr();
                    }
                }
                g
            })
            .collect();
        let s2 = su * sv;
        let mut kept = Vec::with_capacity(snapshots * mu * mv);
        for p in 0..snapshots {
            for ((i, j), &l) in layout.band_map().indexed_iter() {
                kept.push(p * bands * s2 + l * s2 + (cube.0 - 1 + i) * sv + cube.1 - 1 + j);
            }
        }
        let r_m = Restriction::new(kept, snapshots * bands * s2)?;
        let mut voxels = Vec::with_capacity(bands * cube.0 * cube.1);
        for l in 0..bands {
            for a in 0..cube.0 {
                for b in 0..cube.1 {
                    voxels.push(l * s2 + a * sv + b);
                }
            }
        }
        let r_n = Restriction::new(voxels, bands * s2)?;
        Ok(Self {
            phi_bar: MsrcPhiBar {
                fft,
                bands,
                snapshots,
                spectra,
            },
            layout,
            cube,
            aperture,
            kernels,
            gram,
            r_m,
            r_n,
        })
    }

    pub fn aperture(&self) -> &CodedAperture {
        &self.aperture
    }

    pub fn kernels(&self) -> Option<&[DiffractionKernel]> {
        self.kernels.as_deref()
    }

    pub fn aperture_shape(&self) -> (usize, usize) {
        self.aperture.shape()
    }

    /// `S̃_{p,ℓ}`: the pattern of snapshot `p` as seen in band `l`.
    pub fn diffracted_pattern(&self, p: usize, l: usize) -> Array2<f64> {
        match &self.kernels {
            Some(k) => diffract_pattern(self.aperture.pattern(p), &k[l]),
            None => self.aperture.pattern(p).clone(),
        }
    }

    /// `Σ_p |Σ_{p,ℓ}|²` of band `l`, in DFT order.
    pub fn gram_diagonal(&self, l: usize) -> &[f64] {
        &self.gram[l]
    }

    pub fn forward(&self, cube: &MSCube) -> Result<MeasurementFrame> {
        check_len("msrc cube", self.in_dim(), cube.len())?;
        if (cube.rows(), cube.cols()) != self.cube {
            return Err(Error::DimensionMismatch {
                context: "msrc cube rows",
                expected: self.cube.0,
                got: cube.rows(),
            });
        }
        let y = self.apply(&cube.vectorize())?;
        MeasurementFrame::from_vector(&y, self.layout.rows(), self.layout.cols(), 0.0)
    }
}

impl LinearOperator for MsrcOperator {
    fn in_dim(&self) -> usize {
        self.cube.0 * self.cube.1 * self.layout.bands()
    }
    fn out_dim(&self) -> usize {
        self.aperture.snapshots() * self.layout.rows() * self.layout.cols()
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Composite
    }

    /// `Y_p = Σ_ℓ M_ℓ (S̃_{p,ℓ} *̄ X_ℓ)`, each valid convolution done as a
    /// circular one on the aperture grid and read off the valid window.
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        assert_shape(self, x.len(), out.len(), false);
        let pb = &self.phi_bar;
        let (su, sv) = (pb.fft.rows(), pb.fft.cols());
        let (nu, nv) = self.cube;
        let (mu, mv) = (self.layout.rows(), self.layout.cols());
        let padded: Vec<Vec<f64>> = x
            .chunks_exact(nu * nv)
            .map(|band| {
                let mut z = vec![0.0; su * sv];
                for a in 0..nu {
                    z[a * sv..a * sv + nv].copy_from_slice(&band[a * nv..(a + 1) * nv]);
                }
                z
            })
            .collect();
        let inputs: Vec<&[f64]> = padded.iter().map(|v| v.as_slice()).collect();
        let xs = forward_many(&pb.fft, &inputs);
        let mut conv = vec![0.0; 2 * su * sv];
        for p in 0..pb.snapshots {
            let y = &mut out[p * mu * mv..(p + 1) * mu * mv];
            for pair in (0..pb.bands).collect::<Vec<_>>().chunks(2) {
                let spec: Vec<Vec<Complex64>> = pair
                    .iter()
                    .map(|&l| pb.spectra[p * pb.bands + l].iter().zip(&xs[l]).map(|(s, v)| s * v).collect())
                    .collect();
                inverse_many(&pb.fft, &spec, &mut conv[..pair.len() * su * sv]);
                for (slot, &l) in pair.iter().enumerate() {
                    let c = &conv[slot * su * sv..(slot + 1) * su * sv];
                    for ((i, j), &b) in self.layout.band_map().indexed_iter() {
                        if b == l {
                            y[i * mv + j] = c[(nu - 1 + i) * sv + nv - 1 + j];
                        }
                    }
                }
            }
        }
    }

    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        assert_shape(self, y.len(), out.len(), true);
        let pb = &self.phi_bar;
        let (su, sv) = (pb.fft.rows(), pb.fft.cols());
        let (nu, nv) = self.cube;
        let (mu, mv) = (self.layout.rows(), self.layout.cols());
        let mut acc = vec![vec![ZERO; su * sv]; pb.bands];
        for p in 0..pb.snapshots {
            let yp = &y[p * mu * mv..(p + 1) * mu * mv];
            let scattered: Vec<Vec<f64>> = (0..pb.bands)
                .map(|l| {
                    let mut z = vec![0.0; su * sv];
                    for ((i, j), &b) in self.layout.band_map().indexed_iter() {
                        if b == l {
                            z[(nu - 1 + i) * sv + nv - 1 + j] = yp[i * mv + j];
                        }
                    }
                    z
                })
                .collect();
            let inputs: Vec<&[f64]> = scattered.iter().map(|v| v.as_slice()).collect();
            for (l, yh) in forward_many(&pb.fft, &inputs).iter().enumerate() {
                for ((a, s), v) in acc[l].iter_mut().zip(&pb.spectra[p * pb.bands + l]).zip(yh) {
                    *a += s.conj() * v;
                }
            }
        }
        let mut full = vec![0.0; pb.bands * su * sv];
        inverse_many(&pb.fft, &acc, &mut full);
        for (l, band) in out.chunks_exact_mut(nu * nv).enumerate() {
            for a in 0..nu {
                let src = &full[l * su * sv + a * sv..l * su * sv + a * sv + nv];
                band[a * nv..(a + 1) * nv].copy_from_slice(src);
            }
        }
    }
}

impl ExtendedSensing for MsrcOperator {
    fn architecture(&self) -> Architecture {
        Architecture::Msrc
    }
    fn cube_dims(&self) -> (usize, usize, usize) {
        (self.cube.0, self.cube.1, self.layout.bands())
    }
    fn layout(&self) -> &SensorLayout {
        &self.layout
    }
    fn snapshots(&self) -> usize {
        self.aperture.snapshots()
    }
    fn phi_bar(&self) -> &dyn LinearOperator {
        &self.phi_bar
    }
    fn r_m(&self) -> &Restriction {
        &self.r_m
    }
    fn r_n(&self) -> &Restriction {
        &self.r_n
    }

    /// Per band: `F* (Σ̄² + μ)^-1 F`.
    fn normal_inverse_into(&self, v: &[f64], mu: f64, out: &mut [f64]) {
        assert_eq!(v.len(), self.phi_bar.in_dim(), "normal inverse input");
        assert_eq!(out.len(), v.len(), "normal inverse output");
        let fft = &self.phi_bar.fft;
        let inputs: Vec<&[f64]> = v.chunks_exact(fft.len()).collect();
        let mut spectra = forward_many(fft, &inputs);
        for (s, g) in spectra.iter_mut().zip(&self.gram) {
            for (sk, gk) in s.iter_mut().zip(g) {
                *sk /= gk + mu;
            }
        }
        inverse_many(fft, &spectra, out);
    }

    fn phi_bar_norm(&self) -> f64 {
        self.gram
            .iter()
            .flatten()
            .fold(0.0f64, |m, &g| m.max(g))
            .sqrt()
    }

    fn lift_interpolated(&self, y_lin: &[f64]) -> Result<Vec<f64>> {
        let (mu, mv) = (self.layout.rows(), self.layout.cols());
        let (nu, nv) = self.cube;
        let blocks = self.snapshots() * self.layout.bands();
        check_len("interpolated stack", blocks * mu * mv, y_lin.len())?;
        let (su, sv) = self.aperture.shape();
        let mut out = vec![0.0; blocks * su * sv];
        for (k, img) in y_lin.chunks_exact(mu * mv).enumerate() {
            for i in 0..mu {
                let dst = k * su * sv + (nu - 1 + i) * sv + nv - 1;
                out[dst..dst + mv].copy_from_slice(&img[i * mv..(i + 1) * mv]);
            }
        }
        Ok(out)
    }
}

/// Measurements of one scene under three equivalent acquisition schemes.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternEquivalence {
    /// Direct `±1` pattern `S = 2 S₊ - 1`.
    pub signed: Vec<f64>,
    /// Complementary pair, `y₊ - y₋` with `S₋ = 1 - S₊`.
    pub complementary: Vec<f64>,
    /// Fully open reference, `2 y₊ - y_on`.
    pub open_reference: Vec<f64>,
}

impl PatternEquivalence {
    /// Largest pairwise difference relative to the norm of `signed`.
    pub fn max_relative_discrepancy(&self) -> f64 {
        let diff = |a: &[f64], b: &[f64]| {
            a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
        };
        let worst = diff(&self.signed, &self.complementary)
            .max(diff(&self.signed, &self.open_reference))
            .max(diff(&self.complementary, &self.open_reference));
        let scale = norm2(&self.signed);
        if worst == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }
}

/// Simulates the same scene with the `±1` pattern and with the two physical
/// `{0, 1}` differencing schemes built from `open_cells`.
pub fn pattern_equivalence_check(
    layout: &SensorLayout,
    cube: &MSCube,
    open_cells: &[Array2<f64>],
    kernels: Option<Vec<DiffractionKernel>>,
) -> Result<PatternEquivalence> {
    let dims = (cube.rows(), cube.cols());
    let x = cube.vectorize();
    let simulate = |patterns: Vec<Array2<f64>>| -> Result<Vec<f64>> {
        let aperture = CodedAperture::from_patterns(patterns, 0)?;
        MsrcOperator::new(layout.clone(), dims, aperture, kernels.clone())?.apply(&x)
    };
    let signed = simulate(open_cells.iter().map(|s| s.mapv(|v| 2.0 * v - 1.0)).collect())?;
    let plus = simulate(open_cells.to_vec())?;
    let minus = simulate(open_cells.iter().map(|s| s.mapv(|v| 1.0 - v)).collect())?;
    let on = simulate(open_cells.iter().map(|s| s.mapv(|_| 1.0)).collect())?;
    Ok(PatternEquivalence {
        signed,
        complementary: plus.iter().zip(&minus).map(|(a, b)| a - b).collect(),
        open_reference: plus.iter().zip(&on).map(|(a, b)| 2.0 * a - b).collect(),
    })
}
