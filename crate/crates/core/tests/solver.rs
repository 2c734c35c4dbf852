use std::sync::Arc;

use mscs_core::analysis::{AnalysisConfig, AnalysisTransform, ExtendedAnalysis};
use mscs_core::cube::norm2;
use mscs_core::layout::{make_layout, LayoutKind};
use mscs_core::linops::{materialize, LinearOperator};
use mscs_core::msrc::{generate_aperture, MsrcOperator};
use mscs_core::msvi::MsviOperator;
use mscs_core::solver::{admm_solve, interpolate_3d, tikhonov_init, AdmmParams, Problem};
use mscs_core::{ExtendedSensing, MeasurementFrame};
use nalgebra::{DMatrix, DVector};

fn prior_for(sensing: &dyn ExtendedSensing) -> ExtendedAnalysis {
    let (r, c, b) = sensing.cube_dims();
    let tight = Arc::new(AnalysisTransform::new(r, c, b, &AnalysisConfig::default()).unwrap());
    ExtendedAnalysis::new(tight, sensing.r_n()).unwrap()
}

fn smooth_cube(rows: usize, cols: usize, bands: usize) -> Vec<f64> {
    let mut x = Vec::with_capacity(rows * cols * bands);
    for l in 0..bands {
        for i in 0..rows {
            for j in 0..cols {
                let s = (i as f64 / rows as f64 * 3.0).sin() * (j as f64 / cols as f64 * 2.0).cos();
                x.push(0.5 + 0.3 * s * (1.0 - l as f64 / (2.0 * bands as f64)));
            }
        }
    }
    x
}

#[test]
fn identity_sensing_with_zero_noise_returns_the_data() {
    let layout = make_layout(LayoutKind::Random, 8, 8, 1, 1, 0).unwrap();
    let op = MsviOperator::new(layout, 8, 8).unwrap();
    let prior = prior_for(&op);
    let y: Vec<f64> = (0..64).map(|k| ((k * 29) % 17) as f64 / 17.0 - 0.3).collect();
    let problem = Problem::new(&op, &prior, &y, 0.0).unwrap();
    let params = AdmmParams {
        x_min: -10.0,
        x_max: 10.0,
        ..AdmmParams::default()
    };
    let sol = admm_solve(&problem, &params, None).unwrap();
    assert!(sol.converged);
    let err: Vec<f64> = sol.x.iter().zip(&y).map(|(a, b)| a - b).collect();
    assert!(norm2(&err) <= 1e-3 * norm2(&y), "{}", norm2(&err));
}

#[test]
fn tikhonov_closed_form_when_upsampling_is_identity() {
    let layout = make_layout(LayoutKind::Mosaic, 16, 16, 4, 2, 0).unwrap();
    let op = MsviOperator::new(layout.clone(), 16, 16).unwrap();
    let x = smooth_cube(16, 16, 4);
    let y = op.apply(&x).unwrap();
    let frame = MeasurementFrame::from_vector(&y, 16, 16, 0.0).unwrap();
    let tau = 0.7;
    let init = tikhonov_init(&op, &frame, tau).unwrap();
    let y_lin = interpolate_3d(&frame, &layout).unwrap();
    for (a, b) in init.x.iter().zip(&y_lin) {
        assert!((a - b / (1.0 + tau * tau)).abs() < 1e-12);
    }
}

#[test]
fn tikhonov_matches_dense_regularized_solve() {
    let layout = make_layout(LayoutKind::Random, 4, 4, 2, 1, 3).unwrap();
    let aperture = generate_aperture((5, 5), (4, 4), 2, 4).unwrap();
    let op = MsrcOperator::new(layout.clone(), (5, 5), aperture, None).unwrap();
    let x = smooth_cube(5, 5, 2);
    let y = op.apply(&x).unwrap();
    let frame = MeasurementFrame::from_vector(&y, 4, 4, 0.0).unwrap();
    let tau = 2.0;
    let init = tikhonov_init(&op, &frame, tau).unwrap();

    let y_bar = op.lift_interpolated(&init.y_lin).unwrap();
    let pb = materialize(op.phi_bar());
    let rn = materialize(op.r_n());
    let pb = DMatrix::from_row_slice(pb.rows(), pb.cols(), pb.as_slice());
    let rn = DMatrix::from_row_slice(rn.rows(), rn.cols(), rn.as_slice());
    let b = &pb * rn.transpose();
    let lhs = b.transpose() * &b + DMatrix::identity(b.ncols(), b.ncols()) * (tau * tau);
    let rhs = b.transpose() * DVector::from_vec(y_bar);
    let exact = lhs.clone().lu().solve(&rhs).unwrap();
    let diff: f64 = exact.iter().zip(&init.x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    // CG stops at relative residual 1e-3 or ten steps; the error is bounded
    // by the residual times the condition number of the small system.
    let eig = lhs.clone().symmetric_eigen().eigenvalues;
    let cond = eig.max() / eig.min();
    assert!(init.cg.iterations <= 10);
    assert!(
        diff <= init.cg.relative_residual * cond * exact.norm() * 1.01,
        "diff {diff} residual {} cond {cond}",
        init.cg.relative_residual
    );
}

#[test]
fn constraints_hold_on_a_noisy_msrc_instance() {
    let layout = make_layout(LayoutKind::Random, 8, 8, 2, 1, 5).unwrap();
    let aperture = generate_aperture((8, 8), (8, 8), 1, 6).unwrap();
    let op = MsrcOperator::new(layout, (8, 8), aperture, None).unwrap();
    let prior = prior_for(&op);
    let x = smooth_cube(8, 8, 2);
    let mut y = op.apply(&x).unwrap();
    let noise: Vec<f64> = (0..y.len()).map(|k| 0.01 * (((k * 7919) % 23) as f64 / 11.0 - 1.0)).collect();
    y.iter_mut().zip(&noise).for_each(|(a, b)| *a += b);
    let tau = norm2(&noise);
    let init = tikhonov_init(&op, &MeasurementFrame::from_vector(&y, 8, 8, tau).unwrap(), tau).unwrap();
    let problem = Problem::new(&op, &prior, &y, tau).unwrap();
    let sol = admm_solve(&problem, &AdmmParams::default(), Some(&init.x)).unwrap();
    assert!(sol.converged, "{} iterations", sol.iterations);
    assert!(sol.x.iter().all(|v| (-1e-8..=1.0 + 1e-8).contains(v)));
    let outside = op.r_n().complement().apply(&sol.state.x_copy).unwrap();
    assert!(outside.iter().all(|v| v.abs() <= 1e-8));
    let last = sol.telemetry.records.last().unwrap();
    assert!(last.feasibility_gap <= 1e-2 * tau, "gap {} tau {tau}", last.feasibility_gap);

    // The padding block of x̄ settles more slowly than the stopping rule, so
    // the cube alone meets the noise bound once iterated further.
    let params = AdmmParams {
        tol: 5e-6,
        max_iter: 20000,
        ..AdmmParams::default()
    };
    let tight = admm_solve(&problem, &params, Some(&init.x)).unwrap();
    assert!(tight.converged);
    assert!(tight.feasibility_gap <= 1e-2 * tau, "gap {} tau {tau}", tight.feasibility_gap);
    assert!((sol.objective - tight.objective).abs() <= 5e-3 * tight.objective);
}
