//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run a subset with `cargo test --test acceptance -- 1 3`. Criterion 9 runs
//! only when `MSCS_CAVE_CHART_DIR` points at the 31 per-band PNGs of the CAVE
//! "chart and stuffed toy" scene.

mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use mscs_core::analysis::{AnalysisConfig, AnalysisTransform, ExtendedAnalysis};
use mscs_core::cube::{default_wavelengths, dot, norm2};
use mscs_core::linops::{adjoint_dot_test, random_vector, Restriction};
use mscs_core::msrc::{
    diffract_pattern, generate_aperture, pattern_equivalence_check, valid_convolve_direct, valid_convolve_fft,
    DiffractionKernel, MsrcOperator, Optics,
};
use mscs_core::msvi::{MsviOperator, UpsamplingOperator};
use mscs_core::solver::{tikhonov_init, AdmmParams};
use mscs_core::{
    make_layout, Architecture, ExperimentConfig, ExtendedSensing, LayoutKind, LinearOperator, MeasurementFrame, PsfMode,
};
use mscs_harness::dataset::{ingest_band_directory, synthetic_cube, BandDirectory, Roi};
use mscs_harness::noise::add_noise;
use mscs_harness::run_on_scene;
use mscs_harness::sweep::{monotonicity_violations, plot_curves, run_sweep, summarize, write_csv, SweepJob, SweepRow};
use nalgebra::DMatrix;
use ndarray::Array2;
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{compare_with_oracle, dense, dense_adjoint, rel_diff};

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, summary: String) -> Verdict {
    if ok {
        Verdict::Pass(summary)
    } else {
        Verdict::Fail(summary)
    }
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let s = norm2(b);
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

// ---------------------------------------------------------------- criterion 1

/// Worst errors seen over one operator family.
#[derive(Default, Clone, Copy)]
struct OpErrors {
    adjoint: f64,
    transpose: f64,
    oracle: f64,
    instances: usize,
}

impl OpErrors {
    fn worst(&self) -> f64 {
        self.adjoint.max(self.transpose).max(self.oracle)
    }
}

const OP_TOL: f64 = 1e-10;

/// Adjoint dot test, `materialize(A*) = materialize(A)^T`, and agreement with
/// an independently assembled dense matrix when one is given.
fn check_operator(op: &dyn LinearOperator, oracle: Option<&DMatrix<f64>>, errs: &mut OpErrors, seed: u64) -> f64 {
    assert!(op.in_dim() * op.out_dim() <= 1_000_000, "instance too large to materialize");
    let adjoint = adjoint_dot_test(op, 3, seed);
    let m = dense(op);
    let transpose = rel_diff(&dense_adjoint(op).transpose(), &m);
    let oracle = oracle.map_or(0.0, |o| rel_diff(&m, o));
    errs.adjoint = errs.adjoint.max(adjoint);
    errs.transpose = errs.transpose.max(transpose);
    errs.oracle = errs.oracle.max(oracle);
    errs.instances += 1;
    adjoint.max(transpose).max(oracle)
}

fn resampler_dense(up: &UpsamplingOperator) -> DMatrix<f64> {
    let one_axis = |r: &mscs_core::msvi::Resampler1d| {
        let mut m = DMatrix::zeros(r.dst_len(), r.src_len());
        for i in 0..r.dst_len() {
            for &(j, w) in r.row(i) {
                m[(i, j)] += w;
            }
        }
        m
    };
    let (ru, rv) = up.axes();
    one_axis(ru).kronecker(&one_axis(rv))
}

fn block_diag(block: &DMatrix<f64>, count: usize) -> DMatrix<f64> {
    let (r, c) = block.shape();
    let mut out = DMatrix::zeros(r * count, c * count);
    for k in 0..count {
        out.view_mut((k * r, k * c), (r, c)).copy_from(block);
    }
    out
}

fn msvi_oracle(op: &MsviOperator, up_dense: &DMatrix<f64>) -> DMatrix<f64> {
    let layout = ExtendedSensing::layout(op);
    let n_band = up_dense.ncols();
    let mut out = DMatrix::zeros(layout.rows() * layout.cols(), n_band * layout.bands());
    for i in 0..layout.rows() {
        for j in 0..layout.cols() {
            let p = i * layout.cols() + j;
            let b = layout.band_at(i, j);
            for k in 0..n_band {
                out[(p, b * n_band + k)] = up_dense[(p, k)];
            }
        }
    }
    out
}

fn band_selection_oracle(layout: &mscs_core::SensorLayout, band: usize) -> DMatrix<f64> {
    let pixels: Vec<(usize, usize)> = (0..layout.rows())
        .flat_map(|i| (0..layout.cols()).map(move |j| (i, j)))
        .filter(|&(i, j)| layout.band_at(i, j) == band)
        .collect();
    let mut out = DMatrix::zeros(pixels.len(), layout.rows() * layout.cols());
    for (r, (i, j)) in pixels.into_iter().enumerate() {
        out[(r, i * layout.cols() + j)] = 1.0;
    }
    out
}

/// Coded patterns after optional diffraction, `[p][ℓ]`.
fn effective_patterns(op: &MsrcOperator, bands: usize) -> Vec<Vec<Array2<f64>>> {
    (0..op.aperture().snapshots())
        .map(|p| {
            (0..bands)
                .map(|l| match op.kernels() {
                    Some(k) => diffract_pattern(op.aperture().pattern(p), &k[l]),
                    None => op.aperture().pattern(p).clone(),
                })
                .collect()
        })
        .collect()
}

/// `y_p[i, j] = Σ_{a,b} x_ℓ[a, b] S̃_{p,ℓ}[i + n_u − 1 − a, j + n_v − 1 − b]`
/// with `ℓ` the band of sensor pixel `(i, j)`.
fn msrc_oracle(op: &MsrcOperator, cube: (usize, usize)) -> DMatrix<f64> {
    let layout = ExtendedSensing::layout(op);
    let bands = layout.bands();
    let (nu, nv) = cube;
    let (mu, mv) = (layout.rows(), layout.cols());
    let patterns = effective_patterns(op, bands);
    let mut out = DMatrix::zeros(patterns.len() * mu * mv, bands * nu * nv);
    for (p, per_band) in patterns.iter().enumerate() {
        for i in 0..mu {
            for j in 0..mv {
                let l = layout.band_at(i, j);
                for a in 0..nu {
                    for b in 0..nv {
                        out[(p * mu * mv + i * mv + j, l * nu * nv + a * nv + b)] =
                            per_band[l][[i + nu - 1 - a, j + nv - 1 - b]];
                    }
                }
            }
        }
    }
    out
}

/// Circular convolution on the aperture grid: `out_{p,ℓ}[u, v] =
/// Σ_{a,b} x̄_ℓ[a, b] S̃_{p,ℓ}[(u − a) mod s_u, (v − b) mod s_v]`.
fn msrc_phi_bar_oracle(op: &MsrcOperator, bands: usize) -> DMatrix<f64> {
    let (su, sv) = op.aperture_shape();
    let patterns = effective_patterns(op, bands);
    let s2 = su * sv;
    let mut out = DMatrix::zeros(patterns.len() * bands * s2, bands * s2);
    for (p, per_band) in patterns.iter().enumerate() {
        for (l, pat) in per_band.iter().enumerate() {
            for u in 0..su {
                for v in 0..sv {
                    for a in 0..su {
                        for b in 0..sv {
                            out[((p * bands + l) * s2 + u * sv + v, l * s2 + a * sv + b)] =
                                pat[[(u + su - a) % su, (v + sv - b) % sv]];
                        }
                    }
                }
            }
        }
    }
    out
}

fn restriction_dense(r: &Restriction) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(r.out_dim(), r.in_dim());
    for (row, &k) in r.kept().iter().enumerate() {
        out[(row, k)] = 1.0;
    }
    out
}

fn extended_analysis_oracle(tight: &DMatrix<f64>, keep: &Restriction) -> DMatrix<f64> {
    let head = tight * restriction_dense(keep);
    let tail = restriction_dense(&keep.complement());
    let mut out = DMatrix::zeros(head.nrows() + tail.nrows(), keep.in_dim());
    out.view_mut((0, 0), head.shape()).copy_from(&head);
    out.view_mut((head.nrows(), 0), tail.shape()).copy_from(&tail);
    out
}

fn psf_kernels(psf: u8, bands: usize) -> Option<Vec<DiffractionKernel>> {
    let sensor_pitch = match psf {
        0 => return None,
        1 => 110e-6,
        _ => 55e-6,
    };
    let optics = Optics::new(80e-6, sensor_pitch, 40e-3).unwrap();
    Some(
        default_wavelengths(bands)
            .into_iter()
            .map(|l| DiffractionKernel::new(optics, l).unwrap())
            .collect(),
    )
}

fn criterion_1() -> Verdict {
    let runner = || {
        TestRunner::new_with_rng(
            PropConfig {
                cases: 24,
                failure_persistence: None,
                ..PropConfig::default()
            },
            proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
        )
    };
    let mut errs: Vec<(&str, OpErrors)> = ["Up", "M_l", "Phi_msvi", "PhiBar_msvi", "Phi_msrc", "PhiBar_msrc", "A~", "A-"]
        .into_iter()
        .map(|n| (n, OpErrors::default()))
        .collect();
    let errs_cell = std::cell::RefCell::new(&mut errs);

    let msvi = (1usize..=6, 1usize..=6, 0usize..=5, 0usize..=5, prop::bool::ANY, any::<u64>());
    let result_msvi = runner().run(&msvi, |(nu, nv, du, dv, mosaic, seed)| {
        let mut e = errs_cell.borrow_mut();
        let (kind, bands, period) = if mosaic { (LayoutKind::Mosaic, 4, 2) } else { (LayoutKind::Random, 3, 1) };
        let layout = make_layout(kind, nu + du, nv + dv, bands, period, seed).unwrap();
        let op = MsviOperator::new(layout.clone(), nu, nv).unwrap();
        let up_dense = resampler_dense(op.upsampling());
        let mut worst = check_operator(op.upsampling(), Some(&up_dense), &mut e[0].1, seed);
        for l in 0..bands {
            let m_l = Restriction::new(layout.pixels_of_band(l), layout.rows() * layout.cols()).unwrap();
            worst = worst.max(check_operator(&m_l, Some(&band_selection_oracle(&layout, l)), &mut e[1].1, seed));
        }
        worst = worst.max(check_operator(&op, Some(&msvi_oracle(&op, &up_dense)), &mut e[2].1, seed));
        worst = worst.max(check_operator(op.phi_bar(), Some(&block_diag(&up_dense, bands)), &mut e[3].1, seed));
        prop_assert!(worst <= OP_TOL, "msvi instance error {worst:e}");
        Ok(())
    });

    let msrc = (2usize..=5, 2usize..=5, 1usize..=5, 1usize..=5, 1usize..=3, 0u8..=2, any::<u64>());
    let result_msrc = runner().run(&msrc, |(nu, nv, mu, mv, snapshots, psf, seed)| {
        let mut e = errs_cell.borrow_mut();
        let bands = 3;
        let layout = make_layout(LayoutKind::Random, mu, mv, bands, 1, seed).unwrap();
        let aperture = generate_aperture((nu, nv), (mu, mv), snapshots, seed ^ 1).unwrap();
        let op = MsrcOperator::new(layout, (nu, nv), aperture, psf_kernels(psf, bands)).unwrap();
        let mut worst = check_operator(&op, Some(&msrc_oracle(&op, (nu, nv))), &mut e[4].1, seed);
        worst = worst.max(check_operator(op.phi_bar(), Some(&msrc_phi_bar_oracle(&op, bands)), &mut e[5].1, seed));
        prop_assert!(worst <= OP_TOL, "msrc instance error {worst:e}");
        Ok(())
    });

    let analysis = (8usize..=9, 8usize..=9, 1usize..=3, 1usize..=3, any::<u64>());
    let result_analysis = runner().run(&analysis, |(rows, cols, bands, sensor, seed)| {
        let mut e = errs_cell.borrow_mut();
        let tight = Arc::new(AnalysisTransform::new(rows, cols, bands, &AnalysisConfig::default()).unwrap());
        let tight_dense = dense(tight.as_ref());
        let mut worst = check_operator(tight.as_ref(), None, &mut e[6].1, seed);
        let layout = make_layout(LayoutKind::Random, sensor, sensor, bands, 1, seed).unwrap();
        let aperture = generate_aperture((rows, cols), (sensor, sensor), 1, seed).unwrap();
        let msrc = MsrcOperator::new(layout, (rows, cols), aperture, None).unwrap();
        let ext = ExtendedAnalysis::new(tight, msrc.r_n()).unwrap();
        let oracle = extended_analysis_oracle(&tight_dense, msrc.r_n());
        worst = worst.max(check_operator(&ext, Some(&oracle), &mut e[7].1, seed));
        prop_assert!(worst <= OP_TOL, "analysis instance error {worst:e}");
        Ok(())
    });

    let failures: Vec<String> = [
        result_msvi.err().map(|e| e.to_string()),
        result_msrc.err().map(|e| e.to_string()),
        result_analysis.err().map(|e| e.to_string()),
    ]
    .into_iter()
    .flatten()
    .collect();
    let detail: Vec<String> = errs
        .iter()
        .map(|(n, e)| format!("{n} {:.1e} ({})", e.worst(), e.instances))
        .collect();
    let ok = failures.is_empty() && errs.iter().all(|(_, e)| e.worst() <= OP_TOL && e.instances > 0);
    verdict(
        ok,
        format!(
            "worst of adjoint/transpose/dense-oracle error per operator (instances): {}{}",
            detail.join(", "),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2() -> Verdict {
    const TOL: f64 = 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_id: f64 = 0.0;
    let mut worst_inner: f64 = 0.0;
    let shapes = [(64, 64, 16), (17, 23, 5), (32, 8, 3), (9, 40, 16), (8, 8, 1), (64, 8, 2)];
    for &(r, c, b) in &shapes {
        let tight = Arc::new(AnalysisTransform::new(r, c, b, &AnalysisConfig::default()).unwrap());
        let x = random_vector(tight.in_dim(), &mut rng);
        let z = random_vector(tight.in_dim(), &mut rng);
        let ax = tight.apply(&x).unwrap();
        let az = tight.apply(&z).unwrap();
        worst_id = worst_id.max(rel(&tight.apply_adjoint(&ax).unwrap(), &x));
        worst_inner = worst_inner.max((dot(&ax, &az) - dot(&x, &z)).abs() / (norm2(&x) * norm2(&z)));
        worst_inner = worst_inner.max((norm2(&ax) - norm2(&x)).abs() / norm2(&x));

        let sensor = (r.min(8), c.min(8));
        let layout = make_layout(LayoutKind::Random, sensor.0, sensor.1, b, 1, 3).unwrap();
        let aperture = generate_aperture((r, c), sensor, 1, 4).unwrap();
        let msrc = MsrcOperator::new(layout, (r, c), aperture, None).unwrap();
        let ext = ExtendedAnalysis::new(tight, msrc.r_n()).unwrap();
        let xb = random_vector(ext.in_dim(), &mut rng);
        worst_id = worst_id.max(rel(&ext.apply_adjoint(&ext.apply(&xb).unwrap()).unwrap(), &xb));
    }
    verdict(
        worst_id <= TOL && worst_inner <= TOL,
        format!(
            "max relative error of A~*A~ x = x and A-*A- x = x: {worst_id:.1e}; inner-product/norm preservation: {worst_inner:.1e} (tol {TOL:.0e}, up to 64x64x16)"
        ),
    )
}

// ---------------------------------------------------------------- criterion 3

fn criterion_3() -> Verdict {
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let s = (rng.random_range(1..=32), rng.random_range(1..=32));
        let n = (rng.random_range(1..=s.0), rng.random_range(1..=s.1));
        let pattern = Array2::from_shape_simple_fn(s, || rng.random::<f64>() * 2.0 - 1.0);
        let image = Array2::from_shape_simple_fn(n, || rng.random::<f64>());
        let direct = valid_convolve_direct(&pattern, &image).unwrap();
        let fft = valid_convolve_fft(&pattern, &image).unwrap();
        let d = direct.as_slice().unwrap();
        worst = worst.max(rel(fft.as_slice().unwrap(), d));
    }
    verdict(worst <= TOL, format!("200 random (s <= 32, n <= s) pairs, worst relative error {worst:.1e} (tol {TOL:.0e})"))
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4() -> Verdict {
    const TOL: f64 = 1e-10;
    let (nu, nv, bands) = (128, 128, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_fact: f64 = 0.0;
    let mut worst_conv: f64 = 0.0;
    let mut worst_inv: f64 = 0.0;
    for snapshots in [1usize, 4] {
        let layout = make_layout(LayoutKind::Random, 128, 128, bands, 1, 40 + snapshots as u64).unwrap();
        let aperture = generate_aperture((nu, nv), (128, 128), snapshots, 41).unwrap();
        let op = MsrcOperator::new(layout.clone(), (nu, nv), aperture, None).unwrap();
        let x = random_vector(op.in_dim(), &mut rng);
        let direct = op.apply(&x).unwrap();
        let lifted = op.r_n().apply_adjoint(&x).unwrap();
        let factored = op.r_m().apply(&op.phi_bar().apply(&lifted).unwrap()).unwrap();
        worst_fact = worst_fact.max(rel(&factored, &direct));
        let z = random_vector(op.out_dim(), &mut rng);
        let adj = op.apply_adjoint(&z).unwrap();
        let adj_factored = op
            .r_n()
            .apply(&op.phi_bar().apply_adjoint(&op.r_m().apply_adjoint(&z).unwrap()).unwrap())
            .unwrap();
        worst_fact = worst_fact.max(rel(&adj_factored, &adj));

        // Per-band valid convolutions, masked by the filter layout.
        let mut expected = vec![0.0; op.out_dim()];
        for p in 0..snapshots {
            for l in 0..bands {
                let image = Array2::from_shape_vec((nu, nv), x[l * nu * nv..(l + 1) * nu * nv].to_vec()).unwrap();
                let conv = valid_convolve_fft(op.aperture().pattern(p), &image).unwrap();
                for ((i, j), &v) in conv.indexed_iter() {
                    if layout.band_at(i, j) == l {
                        expected[p * 128 * 128 + i * 128 + j] = v;
                    }
                }
            }
        }
        worst_conv = worst_conv.max(rel(&direct, &expected));

        for mu in [1.0, 1e-2] {
            let v = random_vector(op.phi_bar().in_dim(), &mut rng);
            let sol = op.normal_inverse(&v, mu).unwrap();
            let mut back = op.phi_bar().apply_adjoint(&op.phi_bar().apply(&sol).unwrap()).unwrap();
            back.iter_mut().zip(&sol).for_each(|(b, s)| *b += mu * s);
            worst_inv = worst_inv.max(rel(&back, &v));
        }
    }
    verdict(
        worst_fact <= TOL && worst_conv <= TOL && worst_inv <= TOL,
        format!(
            "128x128x4, m_S in {{1, 4}}: Phi vs R_m PhiBar R_n* {worst_fact:.1e}, Phi vs masked valid convolutions {worst_conv:.1e}, normal-inverse residual {worst_inv:.1e} (tol {TOL:.0e})"
        ),
    )
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for (sensor_pitch, expected) in [(55e-6, 11usize), (110e-6, 5usize)] {
        let optics = Optics::new(80e-6, sensor_pitch, 40e-3).unwrap();
        let k = DiffractionKernel::new(optics, 620.0).unwrap();
        let width = k.main_lobe_width_px();
        let sum_err = (k.sum_2d() - 1.0).abs();
        ok &= (width as f64 - expected as f64).abs() <= 0.5 && sum_err <= 1e-12;
        parts.push(format!(
            "Dm {:.0} um: main lobe {width} px (expected {expected} +- 0.5; continuous zero-to-zero {:.2} px), |sum - 1| {sum_err:.1e}",
            sensor_pitch * 1e6,
            2.0 * k.first_zero_px()
        ));
    }
    verdict(ok, parts.join("; "))
}

// ---------------------------------------------------------------- criterion 6

/// ADMM runs as the pipeline runs it: default parameters, warm-started from
/// the Tikhonov initialization.
fn criterion_6() -> Verdict {
    const OBJ_TOL: f64 = 5e-3;
    let params = AdmmParams::default();
    let mut lines = Vec::new();
    let mut ok = true;
    let cases: Vec<(&str, Box<dyn ExtendedSensing>, u64)> = vec![
        (
            "msvi random 8x8x4",
            Box::new(MsviOperator::new(make_layout(LayoutKind::Random, 8, 8, 4, 1, 61).unwrap(), 8, 8).unwrap()),
            1,
        ),
        (
            "msvi random 8x8x4 on 10x10",
            Box::new(MsviOperator::new(make_layout(LayoutKind::Random, 10, 10, 4, 1, 64).unwrap(), 8, 8).unwrap()),
            4,
        ),
        (
            "msvi mosaic 8x8x4 on 12x12",
            Box::new(MsviOperator::new(make_layout(LayoutKind::Mosaic, 12, 12, 4, 2, 0).unwrap(), 8, 8).unwrap()),
            2,
        ),
        (
            "msrc 8x8x4 on 6x6, 2 snapshots",
            Box::new(
                MsrcOperator::new(
                    make_layout(LayoutKind::Random, 6, 6, 4, 1, 62).unwrap(),
                    (8, 8),
                    generate_aperture((8, 8), (6, 6), 2, 63).unwrap(),
                    None,
                )
                .unwrap(),
            ),
            3,
        ),
    ];
    for (name, sensing, seed) in cases {
        let (r, c, b) = sensing.cube_dims();
        let x0 = synthetic_cube(r, c, b, seed).unwrap().vectorize();
        let (y, tau) = add_noise(&sensing.apply(&x0).unwrap(), 30.0, seed);
        let layout = sensing.layout();
        let frame = MeasurementFrame::from_vector(&y, layout.rows(), layout.cols(), tau).unwrap();
        let init = tikhonov_init(sensing.as_ref(), &frame, tau).unwrap();
        let cmp = compare_with_oracle(sensing.as_ref(), &y, tau, &params, Some(&init.x), 400_000);
        let gap = cmp.relative_objective_gap();
        let oracle_gap = (cmp.oracle.objective - cmp.oracle.lower_bound) / cmp.oracle.objective;
        let in_box = cmp.admm.x.iter().all(|&v| v >= params.x_min - 1e-8 && v <= params.x_max + 1e-8);
        let feasible = cmp.admm_residual <= tau * (1.0 + 1e-2);
        let case_ok = cmp.admm.converged
            && cmp.admm.iterations <= 2000
            && gap.abs() <= OBJ_TOL
            && oracle_gap <= 1e-3
            && in_box
            && cmp.complement_max <= 1e-8
            && feasible;
        ok &= case_ok;
        lines.push(format!(
            "{name}: {} its, objective {:+.3}% vs oracle (oracle duality gap {:.0e}), residual/tau {:.4}, box {}, complement {:.0e}",
            cmp.admm.iterations,
            100.0 * gap,
            oracle_gap,
            cmp.admm_residual / tau,
            if in_box { "ok" } else { "violated" },
            cmp.complement_max
        ));
    }
    verdict(ok, lines.join("; "))
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7() -> Verdict {
    const TOL: f64 = 1e-10;
    let mut worst: f64 = 0.0;
    for (k, psf) in [0u8, 1, 2].into_iter().enumerate() {
        let layout = make_layout(LayoutKind::Random, 12, 12, 4, 1, 70 + k as u64).unwrap();
        let cube = synthetic_cube(16, 16, 4, 71 + k as u64).unwrap();
        let aperture = generate_aperture((16, 16), (12, 12), 2, 72 + k as u64).unwrap();
        let open: Vec<_> = (0..2).map(|p| aperture.open_cells(p)).collect();
        let eq = pattern_equivalence_check(&layout, &cube, &open, psf_kernels(psf, 4)).unwrap();
        worst = worst.max(eq.max_relative_discrepancy());
    }
    verdict(
        worst <= TOL,
        format!("signed vs complementary-pair vs open-reference schemes (no PSF, 5 px, 11 px): worst relative discrepancy {worst:.1e} (tol {TOL:.0e})"),
    )
}

// ---------------------------------------------------------------- criterion 8

fn desk_jobs() -> Vec<SweepJob> {
    let base = ExperimentConfig {
        rows: 128,
        cols: 128,
        bands: 16,
        snr_db: 40.0,
        ..Default::default()
    };
    let mut jobs = Vec::new();
    let mut push = |label: &str, cfg: ExperimentConfig| {
        jobs.push(SweepJob {
            label: label.into(),
            sample: 0,
            config: cfg,
        })
    };
    for (label, layout) in [("msvi-mosaic", LayoutKind::Mosaic), ("msvi-random", LayoutKind::Random)] {
        for (r, c) in [(128, 128), (256, 256), (256, 512)] {
            push(
                label,
                ExperimentConfig {
                    architecture: Architecture::Msvi,
                    layout,
                    sensor_rows: r,
                    sensor_cols: c,
                    ..base.clone()
                },
            );
        }
    }
    let msrc = ExperimentConfig {
        architecture: Architecture::Msrc,
        layout: LayoutKind::Random,
        sensor_rows: 128,
        sensor_cols: 128,
        ..base.clone()
    };
    for snapshots in [1, 4, 8] {
        push("msrc", ExperimentConfig { snapshots, ..msrc.clone() });
    }
    push("msrc-5px", ExperimentConfig { snapshots: 8, psf: PsfMode::Px5, ..msrc.clone() });
    push("msrc-11px", ExperimentConfig { snapshots: 8, psf: PsfMode::Px11, ..msrc });
    jobs
}

fn find<'a>(rows: &'a [SweepRow], label: &str, rate: f64) -> Option<&'a SweepRow> {
    rows.iter().find(|r| r.label == label && (r.rate - rate).abs() < 1e-12)
}

fn criterion_8() -> Verdict {
    let jobs = desk_jobs();
    let rows = run_sweep(&jobs, |row| {
        eprintln!(
            "  [8] {} rate {:.4}: PSNR {} (init {}), {} its",
            row.label,
            row.rate,
            row.psnr.map_or("failed".into(), |p| format!("{p:.2}")),
            row.init_psnr.map_or("-".into(), |p| format!("{p:.2}")),
            row.iterations
        )
    });
    let out_dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-desk");
    let _ = std::fs::create_dir_all(&out_dir);
    if let Ok(file) = std::fs::File::create(out_dir.join("sweep.csv")) {
        let _ = write_csv(&rows, file);
    }
    let points = summarize(&rows);
    let _ = plot_curves(&points, &out_dir.join("psnr.png"));

    let psnr = |label: &str, rate: f64| find(&rows, label, rate).and_then(|r| r.psnr);
    let mut parts = Vec::new();
    let mut ok = rows.iter().all(|r| r.error.is_empty());

    let a = find(&rows, "msvi-mosaic", 0.25).and_then(|r| Some((r.psnr?, r.init_psnr?)));
    let a_ok = a.is_some_and(|(p, i)| p - i >= 3.0);
    parts.push(match a {
        Some((p, i)) => format!("(a) MSVI 1/4: {p:.2} vs init {i:.2} dB [{}]", if a_ok { "ok" } else { "FAIL" }),
        None => "(a) missing".into(),
    });

    let rate = 1.0 / 16.0;
    let b = (psnr("msrc", rate), psnr("msvi-mosaic", rate), psnr("msvi-random", rate));
    let b_ok = matches!(b, (Some(r), Some(m), Some(x)) if r >= m && r >= x);
    parts.push(format!(
        "(b) 1/16: MSRC {:.2} vs MSVI mosaic {:.2} / random {:.2} dB [{}]",
        b.0.unwrap_or(f64::NAN),
        b.1.unwrap_or(f64::NAN),
        b.2.unwrap_or(f64::NAN),
        if b_ok { "ok" } else { "FAIL" }
    ));

    let c = (psnr("msrc", 0.5), psnr("msrc-5px", 0.5), psnr("msrc-11px", 0.5));
    let c_ok = matches!(c, (Some(n), Some(f), Some(e)) if n > f && f > e);
    parts.push(format!(
        "(c) MSRC 1/2 PSF none/5px/11px: {:.2} > {:.2} > {:.2} dB [{}]",
        c.0.unwrap_or(f64::NAN),
        c.1.unwrap_or(f64::NAN),
        c.2.unwrap_or(f64::NAN),
        if c_ok { "ok" } else { "FAIL" }
    ));

    let violations = monotonicity_violations(&points, 0.0);
    let d_ok = violations.is_empty();
    parts.push(if d_ok {
        "(d) all curves nondecreasing in m/n [ok]".into()
    } else {
        format!(
            "(d) decreasing segments: {} [FAIL]",
            violations
                .iter()
                .map(|(lo, hi)| format!("{} {:.4}->{:.4}: {:.2}->{:.2}", lo.label, lo.rate, hi.rate, lo.mean_psnr, hi.mean_psnr))
                .collect::<Vec<_>>()
                .join(", ")
        )
    });
    ok &= a_ok && b_ok && c_ok && d_ok;
    verdict(ok, parts.join("; "))
}

// ---------------------------------------------------------------- criterion 9

fn criterion_9() -> Verdict {
    let Ok(dir) = std::env::var("MSCS_CAVE_CHART_DIR") else {
        return Verdict::Skip("MSCS_CAVE_CHART_DIR not set; CAVE chart-and-stuffed-toy bands not supplied".into());
    };
    let roi = Roi {
        center: (230, 280),
        size: 256,
    };
    let cube = match ingest_band_directory(&BandDirectory::cave(dir), &default_wavelengths(16), roi, 1) {
        Ok(c) => c,
        Err(e) => return Verdict::Fail(format!("could not ingest the CAVE scene: {e}")),
    };
    let config = ExperimentConfig {
        rows: 256,
        cols: 256,
        bands: 16,
        sensor_rows: 256,
        sensor_cols: 256,
        snr_db: 40.0,
        ..Default::default()
    };
    match run_on_scene(&config, &cube) {
        Ok(outcome) => {
            let p = outcome.report.psnr;
            verdict(
                (p - 33.0).abs() <= 2.0,
                format!("MSVI mosaic 1/16 on the 256x256x16 ROI: {p:.2} dB (target 33 +- 2)"),
            )
        }
        Err(e) => Verdict::Fail(format!("run failed: {e}")),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("operator correctness", criterion_1),
        ("tight frame", criterion_2),
        ("convolution oracle", criterion_3),
        ("msrc algebra", criterion_4),
        ("diffraction sizing", criterion_5),
        ("solver optimality", criterion_6),
        ("pattern-scheme equivalence", criterion_7),
        ("desk-scale trends", criterion_8),
        ("cave chart reproduction", criterion_9),
    ];
    let selected: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Verdict::Fail(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, text) = match outcome {
            Verdict::Pass(t) => ("PASS", t),
            Verdict::Fail(t) => {
                failed += 1;
                ("FAIL", t)
            }
            Verdict::Skip(t) => ("SKIP", t),
        };
        println!("criterion {id} ({name}): {tag} [{secs:.1} s] {text}");
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
