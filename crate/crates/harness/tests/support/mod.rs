//! Shared test helpers: dense materialization and an independent convex
//! solver for small instances.

#![allow(dead_code)]

use mscs_core::LinearOperator;
use nalgebra::{DMatrix, DVector};

/// Dense copy of `op` built column by column from `apply`.
pub fn dense(op: &dyn LinearOperator) -> DMatrix<f64> {
    let (m, n) = (op.out_dim(), op.in_dim());
    let mut out = DMatrix::zeros(m, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; m];
    for j in 0..n {
        e[j] = 1.0;
        op.apply_into(&e, &mut col);
        out.column_mut(j).copy_from_slice(&col);
        e[j] = 0.0;
    }
    out
}

/// Dense copy of `op*` built column by column from `adjoint`.
pub fn dense_adjoint(op: &dyn LinearOperator) -> DMatrix<f64> {
    let (m, n) = (op.out_dim(), op.in_dim());
    let mut out = DMatrix::zeros(n, m);
    let mut e = vec![0.0; m];
    let mut col = vec![0.0; n];
    for j in 0..m {
        e[j] = 1.0;
        op.adjoint_into(&e, &mut col);
        out.column_mut(j).copy_from_slice(&col);
        e[j] = 0.0;
    }
    out
}

pub fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = b.norm();
    if scale == 0.0 {
        a.norm()
    } else {
        (a - b).norm() / scale
    }
}

/// `min Σ wᵢ |(A x)ᵢ|  s.t. ‖Φ x − y‖₂ ≤ τ, lo ≤ x ≤ hi` on dense matrices.
pub struct DenseL1Problem {
    pub a: DMatrix<f64>,
    pub weights: DVector<f64>,
    pub phi: DMatrix<f64>,
    pub y: DVector<f64>,
    pub tau: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub x: DVector<f64>,
    /// Primal objective at `x`.
    pub objective: f64,
    /// Dual objective: a certified lower bound on the optimum.
    pub lower_bound: f64,
    /// `max(0, ‖Φ x − y‖ − τ)`.
    pub infeasibility: f64,
    pub iterations: usize,
}

impl DenseL1Problem {
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        (&self.a * x).abs().dot(&self.weights)
    }

    pub fn residual(&self, x: &DVector<f64>) -> f64 {
        (&self.phi * x - &self.y).norm()
    }

    /// Dual value of `(u, v)` with `|u| ≤ w` (Fenchel dual through the box).
    fn dual(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let s = -(self.a.tr_mul(u) + self.phi.tr_mul(v));
        let support: f64 = s.iter().map(|&si| (si * self.hi).max(si * self.lo)).sum();
        -v.dot(&self.y) - self.tau * v.norm() - support
    }

    /// Primal-dual hybrid gradient with per-block dual steps, run until the
    /// relative duality gap falls below `gap_tol` with the primal iterate
    /// feasible to `feas_tol * τ` (or `max_iter`).
    pub fn solve(&self, max_iter: usize, gap_tol: f64, feas_tol: f64) -> OracleSolution {
        let n = self.a.ncols();
        let na = spectral_norm(&self.a, None);
        let nphi = spectral_norm(&self.phi, None);
        let scale_phi = if nphi > 0.0 { na / nphi } else { 1.0 };
        let l = 1.01 * spectral_norm(&self.a, Some((&self.phi, scale_phi)));
        let (tau_p, sigma) = (0.95 / l, 0.95 / l);
        let mut x = DVector::from_element(n, 0.5 * (self.lo + self.hi));
        let mut x_bar = x.clone();
        let mut u = DVector::zeros(self.a.nrows());
        let mut v = DVector::zeros(self.phi.nrows());
        let mut best = None;
        for it in 1..=max_iter {
            // Dual ascent; the Φ block is rescaled by `scale_phi`.
            u += sigma * (&self.a * &x_bar);
            for (ui, wi) in u.iter_mut().zip(self.weights.iter()) {
                *ui = ui.clamp(-wi, *wi);
            }
            let s2 = sigma * scale_phi;
            let w = &v + s2 * (&self.phi * &x_bar);
            // prox of s2·g* by Moreau: w − s2·P_ball(w / s2)
            let c = &w / s2 - &self.y;
            let cn = c.norm();
            let proj = if cn <= self.tau { &w / s2 } else { &self.y + c * (self.tau / cn) };
            v = &w - s2 * proj;
            let grad = self.a.tr_mul(&u) + scale_phi * self.phi.tr_mul(&v);
            let x_new = (&x - tau_p * grad).map(|xi| xi.clamp(self.lo, self.hi));
            x_bar = 2.0 * &x_new - &x;
            x = x_new;
            if it % 200 == 0 || it == max_iter {
                let objective = self.objective(&x);
                let lower_bound = self.dual(&u, &(scale_phi * &v));
                let infeasibility = (self.residual(&x) - self.tau).max(0.0);
                let sol = OracleSolution {
                    x: x.clone(),
                    objective,
                    lower_bound,
                    infeasibility,
                    iterations: it,
                };
                let gap = (objective - lower_bound) / objective.abs().max(1e-12);
                if gap <= gap_tol && infeasibility <= feas_tol * self.tau.max(1e-12) {
                    return sol;
                }
                best = Some(sol);
            }
        }
        best.expect("max_iter > 0")
    }
}

/// Largest singular value of `a` (or of `[a; c·b]`) by power iteration.
fn spectral_norm(a: &DMatrix<f64>, stacked: Option<(&DMatrix<f64>, f64)>) -> f64 {
    let n = a.ncols();
    let mut x = DVector::from_fn(n, |i, _| 1.0 + ((i * 37) % 11) as f64 / 11.0);
    let mut sigma = 0.0;
    for _ in 0..300 {
        x /= x.norm();
        let mut ata = a.tr_mul(&(a * &x));
        if let Some((b, c)) = stacked {
            ata += c * c * b.tr_mul(&(b * &x));
        }
        sigma = ata.norm().sqrt();
        x = ata;
        if x.norm() == 0.0 {
            return 0.0;
        }
    }
    sigma
}

use std::sync::Arc;

use mscs_core::analysis::{AnalysisConfig, AnalysisTransform, ExtendedAnalysis};
use mscs_core::solver::{admm_solve, AdmmParams, Problem, Solution};
use mscs_core::ExtendedSensing;

/// ADMM and the dense oracle on the same instance.
pub struct OracleComparison {
    pub admm: Solution,
    pub oracle: OracleSolution,
    pub admm_objective: f64,
    pub admm_residual: f64,
    pub tau: f64,
    /// Largest magnitude of the extended output outside `R_n`.
    pub complement_max: f64,
}

impl OracleComparison {
    /// `(ADMM objective − oracle objective) / oracle objective`.
    pub fn relative_objective_gap(&self) -> f64 {
        (self.admm_objective - self.oracle.objective) / self.oracle.objective
    }
}

pub fn compare_with_oracle(
    sensing: &dyn ExtendedSensing,
    y: &[f64],
    tau: f64,
    params: &AdmmParams,
    x_init: Option<&[f64]>,
    oracle_iters: usize,
) -> OracleComparison {
    let (r, c, b) = sensing.cube_dims();
    let tight = Arc::new(AnalysisTransform::new(r, c, b, &AnalysisConfig::default()).unwrap());
    let prior = ExtendedAnalysis::new(tight.clone(), sensing.r_n()).unwrap();
    let problem = Problem::new(sensing, &prior, y, tau).unwrap();
    let admm = admm_solve(&problem, params, x_init).unwrap();

    let dense_problem = DenseL1Problem {
        a: dense(tight.as_ref()),
        weights: DVector::from_vec(tight.omega()),
        phi: dense(sensing),
        y: DVector::from_column_slice(y),
        tau,
        lo: params.x_min,
        hi: params.x_max,
    };
    let oracle = dense_problem.solve(oracle_iters, 1e-4, 1e-3);
    let x = DVector::from_column_slice(&admm.x);
    let complement = sensing.r_n().complement();
    let complement_max = complement
        .apply(&admm.state.x_copy)
        .unwrap()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    OracleComparison {
        admm_objective: dense_problem.objective(&x),
        admm_residual: dense_problem.residual(&x),
        admm,
        oracle,
        tau,
        complement_max,
    }
}
