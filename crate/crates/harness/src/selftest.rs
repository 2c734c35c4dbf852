//! Quick installation checks run by `mscs selftest`.

use mscs_core::cube::default_wavelengths;
use mscs_core::linops::adjoint_dot_test;
use mscs_core::msrc::{
    generate_aperture, pattern_equivalence_check, valid_convolve_direct, valid_convolve_fft, DiffractionKernel,
    MsrcOperator, Optics,
};
use mscs_core::msvi::MsviOperator;
use mscs_core::{make_layout, Architecture, ExperimentConfig, ExtendedSensing, LayoutKind};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::synthetic_cube;
use crate::error::Result;
use crate::experiment::run_experiment;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn small_operators() -> Result<Vec<(&'static str, Box<dyn ExtendedSensing>)>> {
    let mosaic = make_layout(LayoutKind::Mosaic, 16, 16, 4, 2, 0)?;
    let msvi = MsviOperator::new(mosaic, 8, 8)?;
    let random = make_layout(LayoutKind::Random, 8, 8, 4, 2, 5)?;
    let aperture = generate_aperture((8, 8), (8, 8), 2, 7)?;
    let optics = Optics::new(80e-6, 110e-6, 40e-3)?;
    let kernels = default_wavelengths(4)
        .into_iter()
        .map(|l| DiffractionKernel::new(optics, l))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let msrc = MsrcOperator::new(random, (8, 8), aperture, Some(kernels))?;
    Ok(vec![("msvi", Box::new(msvi)), ("msrc", Box::new(msrc))])
}

pub fn run_selftest() -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let mut worst: f64 = 0.0;
    for (_, op) in small_operators()? {
        worst = worst
            .max(adjoint_dot_test(op.as_ref(), 5, 1))
            .max(adjoint_dot_test(op.phi_bar(), 5, 2));
    }
    checks.push(check("adjoint dot tests", worst < 1e-10, format!("worst relative error {worst:.2e}")));

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (s0, s1) = (rng.random_range(1..24), rng.random_range(1..24));
        let (n0, n1) = (rng.random_range(1..=s0), rng.random_range(1..=s1));
        let x = Array2::from_shape_simple_fn((s0, s1), || rng.random::<f64>() - 0.5);
        let k = Array2::from_shape_simple_fn((n0, n1), || rng.random::<f64>() - 0.5);
        let direct = valid_convolve_direct(&x, &k)?;
        let fft = valid_convolve_fft(&x, &k)?;
        let scale = direct.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let err = (&direct - &fft).iter().map(|v| v * v).sum::<f64>().sqrt() / scale;
        worst = worst.max(err);
    }
    checks.push(check("fft convolution", worst < 1e-12, format!("worst relative error {worst:.2e}")));

    let layout = make_layout(LayoutKind::Random, 8, 8, 4, 2, 3)?;
    let cube = synthetic_cube(8, 8, 4, 4)?;
    let open = generate_aperture((8, 8), (8, 8), 2, 9)?;
    let cells: Vec<_> = (0..2).map(|p| open.open_cells(p)).collect();
    let eq = pattern_equivalence_check(&layout, &cube, &cells, None)?;
    let d = eq.max_relative_discrepancy();
    checks.push(check("pattern schemes", d < 1e-10, format!("max relative discrepancy {d:.2e}")));

    let config = ExperimentConfig {
        architecture: Architecture::Msvi,
        rows: 32,
        cols: 32,
        bands: 4,
        period: 2,
        sensor_rows: 64,
        sensor_cols: 64,
        max_iter: 300,
        ..Default::default()
    };
    let outcome = run_experiment(&config)?;
    let r = &outcome.report;
    checks.push(check(
        "tiny reconstruction",
        r.psnr > r.init_psnr && r.operators_match(),
        format!("PSNR {:.2} dB vs initialization {:.2} dB", r.psnr, r.init_psnr),
    ));
    Ok(checks)
}
