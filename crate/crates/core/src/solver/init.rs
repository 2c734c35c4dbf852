use super::cg::{conjugate_gradient, CgOutcome};
use super::interpolate::interpolate_3d;
use crate::cube::MeasurementFrame;
use crate::error::{check_len, Error, Result};
use crate::linops::LinearOperator;
use crate::sensing::ExtendedSensing;

pub const INIT_CG_TOL: f64 = 1e-3;
pub const INIT_CG_MAX_ITER: usize = 10;

#[derive(Debug, Clone)]
pub struct TikhonovInit {
    /// Initial cube estimate, length `n`.
    pub x: Vec<f64>,
    /// Interpolated measurement stack, `[snapshot][band][row][col]`.
    pub y_lin: Vec<f64>,
    pub cg: CgOutcome,
}

/// Regularized least squares against the interpolated measurements:
/// `((Φ̄ R_n*)* (Φ̄ R_n*) + τ² Id) x = (Φ̄ R_n*)* ȳ_lin`, a few CG steps.
pub fn tikhonov_init(
    sensing: &dyn ExtendedSensing,
    frame: &MeasurementFrame,
    tau: f64,
) -> Result<TikhonovInit> {
    check_len("measurements", sensing.out_dim(), frame.len())?;
    let y_lin = interpolate_3d(frame, sensing.layout())?;
    let y_bar = sensing.lift_interpolated(&y_lin)?;
    let phi_bar = sensing.phi_bar();
    let r_n = sensing.r_n();
    let n_bar = phi_bar.in_dim();
    let rhs = r_n.apply(&phi_bar.apply_adjoint(&y_bar)?)?;
    let tau2 = tau * tau;
    let normal = |x: &[f64], out: &mut [f64]| {
        let mut lifted = vec![0.0; n_bar];
        r_n.adjoint_into(x, &mut lifted);
        let mut image = vec![0.0; phi_bar.out_dim()];
        phi_bar.apply_into(&lifted, &mut image);
        phi_bar.adjoint_into(&image, &mut lifted);
        r_n.apply_into(&lifted, out);
        out.iter_mut().zip(x).for_each(|(o, v)| *o += tau2 * v);
    };
    let mut x = vec![0.0; rhs.len()];
    let cg = conjugate_gradient(normal, &rhs, &mut x, INIT_CG_TOL, INIT_CG_MAX_ITER);
    if !cg.relative_residual.is_finite() || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotFinite {
            what: "tikhonov initialization",
            iteration: cg.iterations,
        });
    }
    Ok(TikhonovInit { x, y_lin, cg })
}
