use mscs_core::MSCube;

use crate::error::{HarnessError, Result};

/// Reported in place of an infinite PSNR.
pub const PSNR_CAP: f64 = 999.0;

fn psnr_of_mse(mse: f64) -> f64 {
    if mse <= 0.0 {
        PSNR_CAP
    } else {
        (-10.0 * mse.log10()).min(PSNR_CAP)
    }
}

/// `-10 log10(MSE)` for signals normalized to `[0, 1]`.
pub fn psnr(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() || truth.is_empty() {
        return Err(HarnessError::Data(format!(
            "PSNR of {} against {} samples",
            estimate.len(),
            truth.len()
        )));
    }
    let mse = estimate
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / truth.len() as f64;
    Ok(psnr_of_mse(mse))
}

pub fn cube_psnr(estimate: &MSCube, truth: &MSCube) -> Result<f64> {
    psnr(&estimate.vectorize(), &truth.vectorize())
}

pub fn per_band_psnr(estimate: &MSCube, truth: &MSCube) -> Result<Vec<f64>> {
    if estimate.data().dim() != truth.data().dim() {
        return Err(HarnessError::Data("cube shapes differ".into()));
    }
    (0..truth.bands())
        .map(|b| {
            let e: Vec<f64> = estimate.band(b).iter().copied().collect();
            let t: Vec<f64> = truth.band(b).iter().copied().collect();
            psnr(&e, &t)
        })
        .collect()
}
