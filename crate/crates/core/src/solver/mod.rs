//! Constrained ℓ1-analysis recovery
//! `min ‖A x‖₁ s.t. ‖y - Φ x‖₂ ≤ τ, x ∈ [x_min, x_max]ⁿ`,
//! solved on the extended variable `x̄` of the sensing factorization.

mod admm;
mod cg;
mod init;
mod interpolate;
mod prox;

pub use admm::{admm_solve, AdmmParams, IterationRecord, Problem, Solution, SolverState, Telemetry};
pub use cg::{conjugate_gradient, CgOutcome};
pub use init::{tikhonov_init, TikhonovInit, INIT_CG_MAX_ITER, INIT_CG_TOL};
pub use interpolate::interpolate_3d;
pub use prox::{prox_box_and_zero, prox_l2_ball, prox_weighted_l1};
