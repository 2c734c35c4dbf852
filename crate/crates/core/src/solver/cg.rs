use crate::cube::{dot, norm2};

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome {
    pub iterations: usize,
    /// `‖b - M x‖ / ‖b‖` at exit.
    pub relative_residual: f64,
    pub converged: bool,
}

/// Conjugate gradients for `M x = b` with `M` symmetric positive definite,
/// starting from the contents of `x`.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> CgOutcome {
    let n = b.len();
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return CgOutcome {
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        };
    }
    let mut mx = vec![0.0; n];
    apply(x, &mut mx);
    let mut r: Vec<f64> = b.iter().zip(&mx).map(|(b, m)| b - m).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut iterations = 0;
    while iterations < max_iter && rr.sqrt() > tol * bnorm {
        apply(&p, &mut mx);
        let pmp = dot(&p, &mx);
        if pmp <= 0.0 || !pmp.is_finite() {
            break;
        }
        let alpha = rr / pmp;
        for ((xi, ri), (pi, mi)) in x.iter_mut().zip(r.iter_mut()).zip(p.iter().zip(&mx)) {
            *xi += alpha * pi;
            *ri -= alpha * mi;
        }
        let next = dot(&r, &r);
        let beta = next / rr;
        rr = next;
        p.iter_mut().zip(&r).for_each(|(pi, ri)| *pi = ri + beta * *pi);
        iterations += 1;
    }
    let relative_residual = rr.sqrt() / bnorm;
    CgOutcome {
        iterations,
        relative_residual,
        converged: relative_residual <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_spd_system() {
        let m = [[4.0, 1.0, 0.0], [1.0, 3.0, 0.5], [0.0, 0.5, 2.0]];
        let apply = |x: &[f64], out: &mut [f64]| {
            for i in 0..3 {
                out[i] = (0..3).map(|j| m[i][j] * x[j]).sum();
            }
        };
        let b = [1.0, 2.0, 3.0];
        let mut x = [0.0; 3];
        let out = conjugate_gradient(apply, &b, &mut x, 1e-12, 10);
        assert!(out.converged && out.iterations <= 3);
        let mut check = [0.0; 3];
        apply(&x, &mut check);
        for (c, b) in check.iter().zip(&b) {
            assert!((c - b).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_rhs() {
        let mut x = [1.0, 2.0];
        let out = conjugate_gradient(|x, o| o.copy_from_slice(x), &[0.0, 0.0], &mut x, 1e-3, 5);
        assert!(out.converged);
        assert_eq!(x, [0.0, 0.0]);
    }
}
