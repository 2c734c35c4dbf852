//! Verification helpers: dot-product adjoint test, power iteration, dense
//! materialization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{DenseMatrix, LinearOperator};
use crate::cube::{dot, norm2};

pub fn random_vector<R: Rng>(len: usize, rng: &mut R) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// Power iteration on `A*A`, returning the estimate of the largest singular value.
pub fn estimate_operator_norm(op: &dyn LinearOperator, iterations: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = random_vector(op.in_dim(), &mut rng);
    let n = norm2(&x);
    if n == 0.0 {
        return 0.0;
    }
    x.iter_mut().for_each(|v| *v /= n);
    let mut ax = vec![0.0; op.out_dim()];
    let mut sigma = 0.0;
    for _ in 0..iterations.max(1) {
        op.apply_into(&x, &mut ax);
        sigma = norm2(&ax);
        op.adjoint_into(&ax, &mut x);
        let n = norm2(&x);
        if n == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|v| *v /= n);
    }
    op.apply_into(&x, &mut ax);
    sigma.max(norm2(&ax))
}

/// Largest normalized defect `|<Ax, z> - <x, A*z>| / (|x| |z| |A|)` over
/// Gaussian trials.
pub fn adjoint_dot_test(op: &dyn LinearOperator, trials: usize, seed: u64) -> f64 {
    let norm = estimate_operator_norm(op, 20, seed ^ 0x5eed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ax = vec![0.0; op.out_dim()];
    let mut atz = vec![0.0; op.in_dim()];
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let x = random_vector(op.in_dim(), &mut rng);
        let z = random_vector(op.out_dim(), &mut rng);
        op.apply_into(&x, &mut ax);
        op.adjoint_into(&z, &mut atz);
        let defect = (dot(&ax, &z) - dot(&x, &atz)).abs();
        let scale = norm2(&x) * norm2(&z) * norm;
        if defect > 0.0 {
            worst = worst.max(if scale > 0.0 { defect / scale } else { f64::INFINITY });
        }
    }
    worst
}

/// Column-by-column dense copy of the operator.
pub fn materialize(op: &dyn LinearOperator) -> DenseMatrix {
    let (rows, cols) = (op.out_dim(), op.in_dim());
    let mut m = DenseMatrix::zeros(rows, cols);
    let mut e = vec![0.0; cols];
    let mut col = vec![0.0; rows];
    for j in 0..cols {
        e[j] = 1.0;
        op.apply_into(&e, &mut col);
        for (i, &v) in col.iter().enumerate() {
            m.set(i, j, v);
        }
        e[j] = 0.0;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{Diagonal, Identity, Restriction};

    #[test]
    fn identity_defect_is_zero() {
        assert_eq!(adjoint_dot_test(&Identity(17), 10, 0), 0.0);
    }

    #[test]
    fn diagonal_norm() {
        let est = estimate_operator_norm(&Diagonal(vec![1.0, 3.0, 2.0]), 50, 1);
        assert!((est - 3.0).abs() <= 0.03);
    }

    #[test]
    fn restriction_norm() {
        let r = Restriction::new(vec![3, 0, 8], 10).unwrap();
        assert!((estimate_operator_norm(&r, 5, 2) - 1.0).abs() < 1e-12);
    }
}
