//! The extended-sensing contract shared by both architectures.
//!
//! A sensing operator `Φ: R^n -> R^m` is factorized as `Φ = R_m Φ̄ R_n*`, where
//! `Φ̄` acts on an extended domain of size `n̄` with an output of size `m̄` and
//! `Φ̄*Φ̄ + μ Id` is cheap to invert. The solver only talks to this trait.

use crate::config::Architecture;
use crate::error::{check_len, Result};
use crate::layout::SensorLayout;
use crate::linops::{estimate_operator_norm, LinearOperator, Restriction};

pub trait ExtendedSensing: LinearOperator {
    fn architecture(&self) -> Architecture;

    /// `(rows, cols, bands)` of the recovered cube.
    fn cube_dims(&self) -> (usize, usize, usize);

    fn layout(&self) -> &SensorLayout;

    fn snapshots(&self) -> usize;

    fn phi_bar(&self) -> &dyn LinearOperator;

    /// Selects the `m` recorded entries out of the `m̄` outputs of `Φ̄`.
    fn r_m(&self) -> &Restriction;

    /// Selects the `n` cube voxels out of the `n̄` extended unknowns.
    fn r_n(&self) -> &Restriction;

    /// `out = (Φ̄*Φ̄ + μ Id)^-1 v`.
    fn normal_inverse_into(&self, v: &[f64], mu: f64, out: &mut [f64]);

    fn normal_inverse(&self, v: &[f64], mu: f64) -> Result<Vec<f64>> {
        check_len("normal inverse input", self.phi_bar().in_dim(), v.len())?;
        let mut out = vec![0.0; v.len()];
        self.normal_inverse_into(v, mu, &mut out);
        Ok(out)
    }

    /// Spectral norm of `Φ̄`; implementations with a closed form override this.
    fn phi_bar_norm(&self) -> f64 {
        estimate_operator_norm(self.phi_bar(), 100, 0)
    }

    /// Maps an interpolated stack of `snapshots * bands` sensor-sized images
    /// into the output space of `Φ̄`, such that `R_m` of the result picks the
    /// recorded value of every pixel.
    fn lift_interpolated(&self, y_lin: &[f64]) -> Result<Vec<f64>>;
}
