use std::sync::Arc;

use super::UpsamplingOperator;
use crate::config::Architecture;
use crate::cube::{MSCube, MeasurementFrame};
use crate::error::{check_len, Error, Result};
use crate::layout::SensorLayout;
use crate::linops::{assert_shape, BlockDiagRepeat, LinearOperator, OperatorKind, Restriction};
use crate::sensing::ExtendedSensing;

/// `Φ = (M_1 Up, ..., M_nλ Up)`, with `Φ̄ = bdiag(Up)`, `R_m = M`, `R_n = Id`.
pub struct MsviOperator {
    layout: SensorLayout,
    up: Arc<UpsamplingOperator>,
    phi_bar: BlockDiagRepeat,
    r_m: Restriction,
    r_n: Restriction,
}

impl MsviOperator {
    pub fn new(layout: SensorLayout, cube_rows: usize, cube_cols: usize) -> Result<Self> {
        let up = Arc::new(UpsamplingOperator::new(
            (cube_rows, cube_cols),
            (layout.rows(), layout.cols()),
        )?);
        let bands = layout.bands();
        let sensor = layout.rows() * layout.cols();
        let kept = layout
            .band_map()
            .iter()
            .enumerate()
            .map(|(p, &b)| b * sensor + p)
            .collect();
        let r_m = Restriction::new(kept, bands * sensor)?;
        let n = cube_rows * cube_cols * bands;
        Ok(Self {
            phi_bar: BlockDiagRepeat::new(up.clone(), bands)?,
            r_n: Restriction::leading(n, n)?,
            r_m,
            up,
            layout,
        })
    }

    pub fn upsampling(&self) -> &UpsamplingOperator {
        &self.up
    }

    pub fn forward(&self, cube: &MSCube) -> Result<MeasurementFrame> {
        let (r, c, b) = self.cube_dims();
        if (cube.rows(), cube.cols(), cube.bands()) != (r, c, b) {
            return Err(Error::DimensionMismatch {
                context: "msvi cube",
                expected: r * c * b,
                got: cube.len(),
            });
        }
        let y = self.apply(&cube.vectorize())?;
        MeasurementFrame::from_vector(&y, self.layout.rows(), self.layout.cols(), 0.0)
    }
}

/// `m / n` for a sensor of `sensor` pixels and a cube of `cube` voxels per band.
pub fn msvi_subsampling_rate(sensor: (usize, usize), cube: (usize, usize, usize)) -> f64 {
    (sensor.0 * sensor.1) as f64 / (cube.0 * cube.1 * cube.2) as f64
}

impl LinearOperator for MsviOperator {
    fn in_dim(&self) -> usize {
        self.r_n.out_dim()
    }
    fn out_dim(&self) -> usize {
        self.r_m.out_dim()
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Composite
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        assert_shape(self, x.len(), out.len(), false);
        let (n_in, n_out) = (self.up.in_dim(), self.up.out_dim());
        let mut band = vec![0.0; n_out];
        for (l, xs) in x.chunks_exact(n_in).enumerate() {
            self.up.apply_into(xs, &mut band);
            for ((o, &b), &v) in out.iter_mut().zip(self.layout.band_map()).zip(&band) {
                if b == l {
                    *o = v;
                }
            }
        }
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        assert_shape(self, y.len(), out.len(), true);
        let (n_in, n_out) = (self.up.in_dim(), self.up.out_dim());
        let mut band = vec![0.0; n_out];
        for (l, os) in out.chunks_exact_mut(n_in).enumerate() {
            for ((s, &b), &v) in band.iter_mut().zip(self.layout.band_map()).zip(y) {
                *s = if b == l { v } else { 0.0 };
            }
            self.up.adjoint_into(&band, os);
        }
    }
}

impl ExtendedSensing for MsviOperator {
    fn architecture(&self) -> Architecture {
        Architecture::Msvi
    }
    fn cube_dims(&self) -> (usize, usize, usize) {
        let (r, c) = self.up.src_dims();
        (r, c, self.layout.bands())
    }
    fn layout(&self) -> &SensorLayout {
        &self.layout
    }
    fn snapshots(&self) -> usize {
        1
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
    fn normal_inverse_into(&self, v: &[f64], mu: f64, out: &mut [f64]) {
        let n = self.up.in_dim();
        assert_eq!(v.len(), out.len(), "normal inverse length");
        for (vs, os) in v.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
            self.up.normal_inverse_band(vs, mu, os);
        }
    }
    fn lift_interpolated(&self, y_lin: &[f64]) -> Result<Vec<f64>> {
        check_len("interpolated stack", self.phi_bar.out_dim(), y_lin.len())?;
        Ok(y_lin.to_vec())
    }
}
