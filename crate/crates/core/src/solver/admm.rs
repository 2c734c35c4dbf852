use std::io::Write;

use super::prox::{prox_box_and_zero, prox_l2_ball, prox_weighted_l1};
use crate::analysis::ExtendedAnalysis;
use crate::config::ExperimentConfig;
use crate::cube::norm2;
use crate::error::{check_len, Error, Result};
use crate::linops::LinearOperator;
use crate::sensing::ExtendedSensing;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmmParams {
    /// Penalty `ρ`; `μ₂ = μ₃ = ρ` and `μ₁ = mu1_scale ρ / ‖Φ̄‖²`.
    pub rho: f64,
    pub mu1_scale: f64,
    pub max_iter: usize,
    /// Stop when `‖x̄ₖ - x̄ₖ₋₁‖ / ‖x̄ₖ‖` falls to this value.
    pub tol: f64,
    pub x_min: f64,
    pub x_max: f64,
}

impl Default for AdmmParams {
    fn default() -> Self {
        Self {
            rho: 40.0,
            mu1_scale: 50.0,
            max_iter: 2000,
            tol: 5e-5,
            x_min: 0.0,
            x_max: 1.0,
        }
    }
}

impl AdmmParams {
    pub fn from_config(config: &ExperimentConfig) -> Self {
        Self {
            rho: config.rho,
            mu1_scale: config.mu1_scale,
            max_iter: config.max_iter,
            tol: config.tol,
            x_min: config.x_min,
            x_max: config.x_max,
        }
    }

    /// `(μ₁, μ₂, μ₃)` for an extended operator of norm `phi_bar_norm`.
    pub fn penalties(&self, phi_bar_norm: f64) -> [f64; 3] {
        [
            self.mu1_scale * self.rho / (phi_bar_norm * phi_bar_norm),
            self.rho,
            self.rho,
        ]
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.rho) || !positive(self.mu1_scale) || !(self.tol >= 0.0) {
            return Err(Error::InvalidParameter("ADMM penalties must be positive".into()));
        }
        if !(self.x_min < self.x_max) {
            return Err(Error::InvalidParameter("empty range constraint".into()));
        }
        Ok(())
    }
}

/// `min ‖A x‖₁ s.t. ‖y - Φ x‖₂ ≤ τ, x ∈ [x_min, x_max]ⁿ`.
pub struct Problem<'a> {
    pub sensing: &'a dyn ExtendedSensing,
    pub prior: &'a ExtendedAnalysis,
    pub y: &'a [f64],
    pub tau: f64,
}

impl<'a> Problem<'a> {
    pub fn new(
        sensing: &'a dyn ExtendedSensing,
        prior: &'a ExtendedAnalysis,
        y: &'a [f64],
        tau: f64,
    ) -> Result<Self> {
        check_len("measurements", sensing.out_dim(), y.len())?;
        check_len("prior domain", sensing.phi_bar().in_dim(), prior.in_dim())?;
        if !(tau >= 0.0) {
            return Err(Error::InvalidParameter(format!("noise bound must be >= 0, got {tau}")));
        }
        Ok(Self {
            sensing,
            prior,
            y,
            tau,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub relative_change: f64,
    /// `‖y - R_m Φ̄ x̄‖₂ - τ`.
    pub feasibility_gap: f64,
    /// `‖Ω̄ Ā x̄‖₁`.
    pub objective: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Telemetry {
    /// Gap of the starting point.
    pub initial_feasibility_gap: f64,
    pub records: Vec<IterationRecord>,
}

impl Telemetry {
    pub const CSV_HEADER: &'static str = "iteration,relative_change,feasibility_gap,objective";

    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in &self.records {
            writeln!(out, "{}", csv_row(r))?;
        }
        Ok(())
    }
}

pub(crate) fn csv_row(r: &IterationRecord) -> String {
    format!(
        "{},{:e},{:e},{:e}",
        r.iteration, r.relative_change, r.feasibility_gap, r.objective
    )
}

/// ADMM iterates on the extended variable. The auxiliaries are
/// `z̄ ≈ Φ̄ x̄`, `ᾱ ≈ Ā x̄` and a copy of `x̄`, each with a scaled dual.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub x_bar: Vec<f64>,
    pub z_bar: Vec<f64>,
    pub alpha_bar: Vec<f64>,
    pub x_copy: Vec<f64>,
    pub duals: [Vec<f64>; 3],
    pub mu: [f64; 3],
    pub iteration: usize,
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// `x̂ = R_n x̄` taken from the range-constrained copy, length `n`.
    pub x: Vec<f64>,
    pub state: SolverState,
    pub telemetry: Telemetry,
    pub iterations: usize,
    pub converged: bool,
    /// `‖y - Φ x̂‖₂ - τ`.
    pub feasibility_gap: f64,
    /// `‖A x̂‖₁`.
    pub objective: f64,
}

pub fn admm_solve(problem: &Problem<'_>, params: &AdmmParams, x_init: Option<&[f64]>) -> Result<Solution> {
    admm_solve_with(problem, params, x_init, |_| {})
}

/// As [`admm_solve`], calling `observe` after every iteration.
///
/// Auxiliaries start at `proxⱼ(Hⱼ x̄₀)` with zero duals. One iteration, with `Σ μⱼ Hⱼ*Hⱼ = μ₁ (Φ̄*Φ̄ + (μ₂ + μ₃)/μ₁ Id)`:
///
/// 1. `x̄ ← (Φ̄*Φ̄ + (μ₂+μ₃)/μ₁)^-1 [Φ̄*(z̄ - d₁) + μ₂/μ₁ Ā*(ᾱ - d₂) + μ₃/μ₁ (x̄c - d₃)]`
/// 2. `z̄ ← P_ball(Φ̄ x̄ + d₁)`, `ᾱ ← soft(Ā x̄ + d₂, Ω̄/μ₂)`, `x̄c ← P_box(x̄ + d₃)`
/// 3. `dⱼ ← dⱼ + Hⱼ x̄ - auxⱼ`
pub fn admm_solve_with(
    problem: &Problem<'_>,
    params: &AdmmParams,
    x_init: Option<&[f64]>,
    mut observe: impl FnMut(&IterationRecord),
) -> Result<Solution> {
    params.validate()?;
    let sensing = problem.sensing;
    let phi_bar = sensing.phi_bar();
    let prior = problem.prior;
    let r_m = sensing.r_m();
    let r_n = sensing.r_n();
    let kept = r_n.membership();
    let omega = prior.omega_bar();
    let n_bar = phi_bar.in_dim();

    let norm = sensing.phi_bar_norm();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::InvalidParameter(format!("extended operator norm {norm}")));
    }
    let mu = params.penalties(norm);
    let shift = (mu[1] + mu[2]) / mu[0];

    let mut x_bar = vec![0.0; n_bar];
    if let Some(x0) = x_init {
        check_len("initial estimate", r_n.out_dim(), x0.len())?;
        r_n.adjoint_into(x0, &mut x_bar);
    }
    let mut h1 = phi_bar.apply(&x_bar)?;
    let mut h2 = prior.apply(&x_bar)?;
    let gap = |h1: &[f64]| -> f64 {
        let dist = r_m
            .kept()
            .iter()
            .zip(problem.y)
            .map(|(&k, &y)| (h1[k] - y).powi(2))
            .sum::<f64>()
            .sqrt();
        dist - problem.tau
    };
    let mut telemetry = Telemetry {
        initial_feasibility_gap: gap(&h1),
        records: Vec::new(),
    };
    let mut z_bar = h1.clone();
    prox_l2_ball(&mut z_bar, problem.y, problem.tau, r_m);
    let mut alpha_bar = h2.clone();
    prox_weighted_l1(&mut alpha_bar, omega, 1.0 / mu[1]);
    let mut x_copy = x_bar.clone();
    prox_box_and_zero(&mut x_copy, params.x_min, params.x_max, &kept);
    let mut d = [vec![0.0; h1.len()], vec![0.0; h2.len()], vec![0.0; n_bar]];

    let mut rhs = vec![0.0; n_bar];
    let mut tmp = vec![0.0; n_bar];
    let mut next = vec![0.0; n_bar];
    let mut t1 = vec![0.0; h1.len()];
    let mut t2 = vec![0.0; h2.len()];
    let mut converged = false;
    let mut iteration = 0;

    while iteration < params.max_iter {
        iteration += 1;
        for ((t, u), dj) in t1.iter_mut().zip(&z_bar).zip(&d[0]) {
            *t = u - dj;
        }
        phi_bar.adjoint_into(&t1, &mut rhs);
        for ((t, u), dj) in t2.iter_mut().zip(&alpha_bar).zip(&d[1]) {
            *t = u - dj;
        }
        prior.adjoint_into(&t2, &mut tmp);
        let (w2, w3) = (mu[1] / mu[0], mu[2] / mu[0]);
        for (((r, a), u), dj) in rhs.iter_mut().zip(&tmp).zip(&x_copy).zip(&d[2]) {
            *r += w2 * a + w3 * (u - dj);
        }
        sensing.normal_inverse_into(&rhs, shift, &mut next);

        let step = next.iter().zip(&x_bar).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let size = norm2(&next);
        let relative_change = if size > 0.0 { step / size } else { step };
        std::mem::swap(&mut x_bar, &mut next);

        phi_bar.apply_into(&x_bar, &mut h1);
        prior.apply_into(&x_bar, &mut h2);
        let record = IterationRecord {
            iteration,
            relative_change,
            feasibility_gap: gap(&h1),
            objective: crate::analysis::weighted_l1(&h2, omega),
        };
        if !(record.relative_change.is_finite()
            && record.feasibility_gap.is_finite()
            && record.objective.is_finite())
        {
            return Err(Error::NotFinite {
                what: "ADMM iterate",
                iteration,
            });
        }

        for ((u, dj), h) in z_bar.iter_mut().zip(d[0].iter_mut()).zip(&h1) {
            *u = h + *dj;
        }
        d[0].copy_from_slice(&z_bar);
        prox_l2_ball(&mut z_bar, problem.y, problem.tau, r_m);
        for ((u, dj), h) in alpha_bar.iter_mut().zip(d[1].iter_mut()).zip(&h2) {
            *u = h + *dj;
        }
        d[1].copy_from_slice(&alpha_bar);
        prox_weighted_l1(&mut alpha_bar, omega, 1.0 / mu[1]);
        for ((u, dj), h) in x_copy.iter_mut().zip(d[2].iter_mut()).zip(&x_bar) {
            *u = h + *dj;
        }
        d[2].copy_from_slice(&x_copy);
        prox_box_and_zero(&mut x_copy, params.x_min, params.x_max, &kept);
        for (dj, u) in d.iter_mut().zip([&z_bar, &alpha_bar, &x_copy]) {
            dj.iter_mut().zip(u).for_each(|(a, b)| *a -= b);
        }

        observe(&record);
        telemetry.records.push(record);
        if relative_change <= params.tol {
            converged = true;
            break;
        }
    }

    let x = r_n.apply(&x_copy)?;
    let residual: f64 = sensing
        .apply(&x)?
        .iter()
        .zip(problem.y)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let objective = prior
        .transform()
        .analysis_apply(&x)?
        .iter()
        .map(|c| c.abs())
        .sum();
    Ok(Solution {
        x,
        state: SolverState {
            x_bar,
            z_bar,
            alpha_bar,
            x_copy,
            duals: d,
            mu,
            iteration,
        },
        telemetry,
        iterations: iteration,
        converged,
        feasibility_gap: residual - problem.tau,
        objective,
    })
}
