//! Nearest-neighbor demosaicking of mosaic frames.

use mscs_core::{LayoutKind, MSCube, MeasurementFrame, SensorLayout};
use ndarray::Array3;

use crate::error::{HarnessError, Result};

/// Each `period x period` macro-pixel contributes its one sample per band,
/// giving an `(m_u / period) x (m_v / period)` image per band that is then
/// scaled to `rows x cols` by pixel replication.
pub fn nn_demosaick(
    frame: &MeasurementFrame,
    layout: &SensorLayout,
    rows: usize,
    cols: usize,
    wavelengths: Vec<f64>,
) -> Result<MSCube> {
    if layout.kind() != LayoutKind::Mosaic {
        return Err(HarnessError::Data("nearest-neighbor demosaicking needs a mosaic layout".into()));
    }
    let p = layout.period();
    let (mu, mv) = (layout.rows(), layout.cols());
    let image = frame
        .snapshots
        .first()
        .ok_or_else(|| HarnessError::Data("empty measurement frame".into()))?;
    if image.dim() != (mu, mv) || mu % p != 0 || mv % p != 0 {
        return Err(HarnessError::Data(format!(
            "{}x{} frame does not tile into {p}x{p} macro-pixels of a {mu}x{mv} layout",
            image.nrows(),
            image.ncols()
        )));
    }
    let (gu, gv) = (mu / p, mv / p);
    let mut data = Array3::zeros((layout.bands(), rows, cols));
    for ((b, i, j), out) in data.indexed_iter_mut() {
        let (ci, cj) = (i * gu / rows, j * gv / cols);
        let (a, c) = (b / p, b % p);
        debug_assert_eq!(layout.band_at(ci * p + a, cj * p + c), b);
        *out = image[[ci * p + a, cj * p + c]];
    }
    Ok(MSCube::new(data, wavelengths)?)
}
