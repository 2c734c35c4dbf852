use std::f64::consts::SQRT_2;
use std::fmt;

use super::diffraction::Optics;

/// Lens and PSF sizing for a given aperture and band set.
#[derive(Debug, Clone, PartialEq)]
pub struct SizingReport {
    pub optics: Optics,
    pub aperture_cells: (usize, usize),
    /// Lower bound `√2 max(s_u, s_v) Δ_s` on the lens diameter.
    pub min_lens_diameter: f64,
    /// `f / D_lens` at the minimal diameter.
    pub f_number: f64,
    pub f_number_ok: bool,
    pub source_distance: f64,
    /// `(λ in nm, D_PSF in pixels)` per band.
    pub psf_widths: Vec<(f64, f64)>,
}

impl SizingReport {
    pub fn new(optics: Optics, aperture_cells: (usize, usize), wavelengths_nm: &[f64]) -> Self {
        let min_lens_diameter =
            SQRT_2 * aperture_cells.0.max(aperture_cells.1) as f64 * optics.aperture_pitch;
        let f_number = optics.focal_length / min_lens_diameter;
        Self {
            optics,
            aperture_cells,
            min_lens_diameter,
            f_number,
            f_number_ok: f_number >= 0.5,
            source_distance: optics.source_distance(),
            psf_widths: wavelengths_nm
                .iter()
                .map(|&l| (l, optics.psf_width_px(l)))
                .collect(),
        }
    }
}

impl fmt::Display for SizingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = &self.optics;
        writeln!(f, "aperture pitch      {:.3} um", o.aperture_pitch * 1e6)?;
        writeln!(f, "sensor pitch        {:.3} um", o.sensor_pitch * 1e6)?;
        writeln!(f, "focal length        {:.3} mm", o.focal_length * 1e3)?;
        writeln!(f, "aperture cells      {} x {}", self.aperture_cells.0, self.aperture_cells.1)?;
        writeln!(f, "min lens diameter   {:.3} mm", self.min_lens_diameter * 1e3)?;
        writeln!(
            f,
            "f-number            {:.3} ({})",
            self.f_number,
            if self.f_number_ok { "ok, >= 0.5" } else { "below 0.5" }
        )?;
        writeln!(f, "source distance d   {:.3} mm", self.source_distance * 1e3)?;
        writeln!(f, "PSF width per band:")?;
        for (l, w) in &self.psf_widths {
            writeln!(f, "  {l:8.2} nm  {w:7.3} px")?;
        }
        Ok(())
    }
}
