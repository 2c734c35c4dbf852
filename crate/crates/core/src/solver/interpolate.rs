use crate::cube::MeasurementFrame;
use crate::error::{Error, Result};
use crate::layout::{LayoutKind, SensorLayout};

const IDW_MIN_SAMPLES: usize = 4;

/// Fills every band of every snapshot from the pixels that recorded it:
/// bilinear on the band's sub-lattice for mosaic layouts, inverse-distance
/// weighting otherwise. Recorded pixels keep their measured value exactly.
///
/// Output layout is `[snapshot][band][row][col]`.
pub fn interpolate_3d(frame: &MeasurementFrame, layout: &SensorLayout) -> Result<Vec<f64>> {
    let (rows, cols) = (layout.rows(), layout.cols());
    if frame.is_empty() || frame.rows() != rows || frame.cols() != cols {
        return Err(Error::DimensionMismatch {
            context: "interpolated frame",
            expected: rows * cols,
            got: if frame.is_empty() { 0 } else { frame.rows() * frame.cols() },
        });
    }
    let bands = layout.bands();
    let sites: Vec<Vec<usize>> = (0..bands).map(|l| layout.pixels_of_band(l)).collect();
    if let Some(l) = sites.iter().position(|s| s.is_empty()) {
        return Err(Error::EmptyBand(l));
    }
    let mut out = Vec::with_capacity(frame.snapshot_count() * bands * rows * cols);
    for snap in &frame.snapshots {
        let y = snap.as_standard_layout();
        let y = y.as_slice().expect("standard layout");
        for (l, s) in sites.iter().enumerate() {
            let mut img = match layout.kind() {
                LayoutKind::Mosaic => bilinear_lattice(y, rows, cols, s[0], layout.period()),
                _ => inverse_distance(y, layout, l),
            };
            for &p in s {
                img[p] = y[p];
            }
            out.extend(img);
        }
    }
    Ok(out)
}

/// Per-axis bracket `(lower index, upper index, weight of upper)` on the
/// lattice `offset + period * k`, clamped at the ends.
fn bracket(x: usize, offset: usize, period: usize, len: usize) -> (usize, usize, f64) {
    let count = (len - offset).div_ceil(period);
    let pos = (x as f64 - offset as f64) / period as f64;
    if pos <= 0.0 || count == 1 {
        return (0, 0, 0.0);
    }
    let last = (count - 1) as f64;
    if pos >= last {
        return (count - 1, count - 1, 0.0);
    }
    let k = pos.floor();
    (k as usize, k as usize + 1, pos - k)
}

fn bilinear_lattice(y: &[f64], rows: usize, cols: usize, first: usize, period: usize) -> Vec<f64> {
    let (a, b) = (first / cols, first % cols);
    let at = |r: usize, c: usize| y[(a + r * period) * cols + b + c * period];
    let col_brackets: Vec<_> = (0..cols).map(|j| bracket(j, b, period, cols)).collect();
    let mut img = vec![0.0; rows * cols];
    for i in 0..rows {
        let (r0, r1, fr) = bracket(i, a, period, rows);
        for (j, &(c0, c1, fc)) in col_brackets.iter().enumerate() {
            let top = (1.0 - fc) * at(r0, c0) + fc * at(r0, c1);
            let bottom = (1.0 - fc) * at(r1, c0) + fc * at(r1, c1);
            img[i * cols + j] = (1.0 - fr) * top + fr * bottom;
        }
    }
    img
}

fn inverse_distance(y: &[f64], layout: &SensorLayout, band: usize) -> Vec<f64> {
    let (rows, cols) = (layout.rows(), layout.cols());
    let map = layout.band_map();
    let total = layout.band_counts()[band];
    let wanted = IDW_MIN_SAMPLES.min(total);
    let mut img = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            if map[[i, j]] == band {
                continue;
            }
            let mut radius = 1usize;
            loop {
                let (i0, i1) = (i.saturating_sub(radius), (i + radius).min(rows - 1));
                let (j0, j1) = (j.saturating_sub(radius), (j + radius).min(cols - 1));
                let mut found = 0;
                let (mut num, mut den) = (0.0, 0.0);
                for u in i0..=i1 {
                    for v in j0..=j1 {
                        if map[[u, v]] == band {
                            let d2 = (u.abs_diff(i).pow(2) + v.abs_diff(j).pow(2)) as f64;
                            num += y[u * cols + v] / d2;
                            den += 1.0 / d2;
                            found += 1;
                        }
                    }
                }
                let covers_all = i0 == 0 && j0 == 0 && i1 == rows - 1 && j1 == cols - 1;
                if found >= wanted || covers_all {
                    img[i * cols + j] = num / den;
                    break;
                }
                radius += 1;
            }
        }
    }
    img
}
