use std::f64::consts::PI;
use std::sync::OnceLock;

use ndarray::Array2;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Fraction of the untruncated 1-D kernel mass kept by the truncated kernel.
pub const MASS_FRACTION: f64 = 1.0 - 1e-4;

const QUAD_RELATIVE_TOL: f64 = 1e-8;
const QUAD_ORDER: usize = 8;
const QUAD_MAX_DEPTH: u32 = 40;
const MAX_HALF_WIDTH: usize = 1 << 24;

/// Optical geometry of the random-convolution camera, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optics {
    /// Coded-aperture cell pitch `Δ_s`.
    pub aperture_pitch: f64,
    /// Sensor pixel pitch `Δ_m`.
    pub sensor_pitch: f64,
    pub focal_length: f64,
}

impl Optics {
    pub fn new(aperture_pitch: f64, sensor_pitch: f64, focal_length: f64) -> Result<Self> {
        let all_positive = [aperture_pitch, sensor_pitch, focal_length]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !all_positive {
            return Err(Error::InvalidParameter(
                "optical pitches and focal length must be positive".into(),
            ));
        }
        Ok(Self {
            aperture_pitch,
            sensor_pitch,
            focal_length,
        })
    }

    /// Scale `κ` such that the blur is `sinc²(κ x)` for `x` in sensor pixels.
    pub fn kappa(&self, wavelength_nm: f64) -> f64 {
        self.sensor_pitch * self.aperture_pitch / (wavelength_nm * 1e-9 * self.focal_length)
    }

    /// First-zero to first-zero width `2 λ f / (Δ_m Δ_s)` in sensor pixels.
    pub fn psf_width_px(&self, wavelength_nm: f64) -> f64 {
        2.0 / self.kappa(wavelength_nm)
    }

    /// Aperture-to-scene distance `d` implied by `Δ_m = Δ_s f / d`.
    pub fn source_distance(&self) -> f64 {
        self.aperture_pitch * self.focal_length / self.sensor_pitch
    }
}

fn gauss_legendre() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = QUAD_ORDER;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for k in 0..n {
            let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        (nodes, weights)
    })
}

fn gl(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gauss_legendre();
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (left, right) = (gl(f, a, m), gl(f, m, b));
    let refined = left + right;
    if depth == 0 || (refined - whole).abs() <= QUAD_RELATIVE_TOL * refined.abs() {
        refined
    } else {
        adaptive(f, a, m, left, depth - 1) + adaptive(f, m, b, right, depth - 1)
    }
}

/// `∫_a^b f` by adaptive Gauss-Legendre bisection.
pub(crate) fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let whole = gl(&f, a, b);
    adaptive(&f, a, b, whole, QUAD_MAX_DEPTH)
}

fn sinc2(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let s = (PI * x).sin() / (PI * x);
        s * s
    }
}

/// Separable `sinc²` diffraction blur of one band, sampled on sensor pixels.
///
/// Only the 1-D taps are stored: at long wavelengths the mass rule keeps
/// thousands of taps per axis, so the 2-D kernel is never formed implicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffractionKernel {
    optics: Optics,
    wavelength_nm: f64,
    taps: Vec<f64>,
}

impl DiffractionKernel {
    pub fn new(optics: Optics, wavelength_nm: f64) -> Result<Self> {
        if !(wavelength_nm.is_finite() && wavelength_nm > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "wavelength must be positive, got {wavelength_nm}"
            )));
        }
        let kappa = optics.kappa(wavelength_nm);
        let cell = |i: usize| integrate(|x| sinc2(kappa * x), i as f64 - 0.5, i as f64 + 0.5);
        let target = MASS_FRACTION / kappa;
        let mut half = vec![cell(0)];
        let mut mass = half[0];
        while mass < target {
            if half.len() > MAX_HALF_WIDTH {
                return Err(Error::InvalidParameter(format!(
                    "diffraction kernel at {wavelength_nm} nm exceeds {MAX_HALF_WIDTH} taps"
                )));
            }
            let h = cell(half.len());
            mass += 2.0 * h;
            half.push(h);
        }
        let c = half.len() - 1;
        let mut taps: Vec<f64> = (0..=2 * c).map(|k| half[k.abs_diff(c)]).collect();
        let total: f64 = taps.iter().sum();
        taps.iter_mut().for_each(|t| *t /= total);
        Ok(Self {
            optics,
            wavelength_nm,
            taps,
        })
    }

    pub fn optics(&self) -> Optics {
        self.optics
    }

    pub fn wavelength_nm(&self) -> f64 {
        self.wavelength_nm
    }

    /// Centered 1-D taps of odd length `m_h`.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn half_width(&self) -> usize {
        self.taps.len() / 2
    }

    /// Sum of the separable 2-D kernel.
    pub fn sum_2d(&self) -> f64 {
        let s: f64 = self.taps.iter().sum();
        self.taps.iter().map(|h| h * s).sum()
    }

    pub fn center_weight_2d(&self) -> f64 {
        let c = self.taps[self.half_width()];
        c * c
    }

    /// The `m_h x m_h` kernel `h hᵀ`.
    pub fn to_2d(&self) -> Array2<f64> {
        let n = self.taps.len();
        Array2::from_shape_fn((n, n), |(i, j)| self.taps[i] * self.taps[j])
    }

    /// Offset of the first zero of the continuous profile, in pixels, found
    /// by scanning for the first minimum and refining by bisection on the
    /// derivative.
    pub fn first_zero_px(&self) -> f64 {
        let kappa = self.optics.kappa(self.wavelength_nm);
        let profile = |x: f64| sinc2(kappa * x);
        let slope = |x: f64| {
            let h = 1e-6 / kappa;
            profile(x + h) - profile(x - h)
        };
        let step = 1.0 / (64.0 * kappa);
        let mut x = step;
        while profile(x + step) < profile(x) {
            x += step;
        }
        let (mut lo, mut hi) = (x - step, x + step);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if slope(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-13 * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Number of whole pixel cells lying inside the main lobe.
    pub fn main_lobe_width_px(&self) -> usize {
        let z = self.first_zero_px();
        2 * ((z - 0.5).max(0.0).floor() as usize) + 1
    }
}

fn convolve_rows_same(data: &mut Array2<f64>, taps: &[f64]) {
    let (rows, cols) = data.dim();
    let c = taps.len() / 2;
    let reach = c.min(cols - 1);
    if reach == 0 {
        let t = taps[c];
        data.mapv_inplace(|v| v * t);
        return;
    }
    let kernel = &taps[c - reach..=c + reach];
    let n = cols + 2 * reach;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut k = vec![Complex64::new(0.0, 0.0); n];
    for (slot, &t) in k.iter_mut().zip(kernel) {
        *slot = Complex64::new(t, 0.0);
    }
    fwd.process(&mut k);
    let scale = 1.0 / n as f64;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for r in 0..rows {
        buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        for (b, &v) in buf.iter_mut().zip(data.row(r)) {
            b.re = v;
        }
        fwd.process(&mut buf);
        buf.iter_mut().zip(&k).for_each(|(b, k)| *b *= k);
        inv.process(&mut buf);
        for (j, out) in data.row_mut(r).iter_mut().enumerate() {
            *out = buf[j + reach].re * scale;
        }
    }
}

/// `H * S` cropped to the size of `S` around the kernel center.
pub fn diffract_pattern(pattern: &Array2<f64>, kernel: &DiffractionKernel) -> Array2<f64> {
    let mut out = pattern.clone();
    convolve_rows_same(&mut out, kernel.taps());
    let mut t = out.t().as_standard_layout().into_owned();
    convolve_rows_same(&mut t, kernel.taps());
    t.t().as_standard_layout().into_owned()
}
