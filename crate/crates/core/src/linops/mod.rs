//! Linear operators on flat `f64` vectors.
//!
//! Every sensing and analysis map implements [`LinearOperator`]; the structural
//! operators here (restriction, block-diagonal repetition, composition, ...)
//! are enough to express the factorized sensing matrices.

mod basic;
mod check;
mod dense;
mod restriction;

use std::sync::Arc;

pub use basic::{compose, Adjoint, BlockDiagRepeat, Composition, Diagonal, Identity, VStack};
pub use check::{adjoint_dot_test, estimate_operator_norm, materialize, random_vector};
pub use dense::DenseMatrix;
pub use restriction::Restriction;

use crate::error::{check_len, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Identity,
    Dense,
    Diagonal,
    Restriction,
    BlockDiagonal,
    DftDiagonalized,
    Composite,
}

pub trait LinearOperator: Send + Sync {
    fn in_dim(&self) -> usize;
    fn out_dim(&self) -> usize;
    fn kind(&self) -> OperatorKind;

    /// `out = A x`. Panics if the slice lengths disagree with the shape.
    fn apply_into(&self, x: &[f64], out: &mut [f64]);

    /// `out = A* y`. Panics if the slice lengths disagree with the shape.
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("operator input", self.in_dim(), x.len())?;
        let mut out = vec![0.0; self.out_dim()];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    fn apply_adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("adjoint input", self.out_dim(), y.len())?;
        let mut out = vec![0.0; self.in_dim()];
        self.adjoint_into(y, &mut out);
        Ok(out)
    }
}

pub type OpRef = Arc<dyn LinearOperator>;

impl<T: LinearOperator + ?Sized> LinearOperator for Arc<T> {
    fn in_dim(&self) -> usize {
        (**self).in_dim()
    }
    fn out_dim(&self) -> usize {
        (**self).out_dim()
    }
    fn kind(&self) -> OperatorKind {
        (**self).kind()
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).apply_into(x, out)
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        (**self).adjoint_into(y, out)
    }
}

#[inline]
pub(crate) fn assert_shape(op: &dyn LinearOperator, x: usize, out: usize, adjoint: bool) {
    let (i, o) = if adjoint {
        (op.out_dim(), op.in_dim())
    } else {
        (op.in_dim(), op.out_dim())
    };
    assert_eq!(x, i, "operator input length");
    assert_eq!(out, o, "operator output length");
}
