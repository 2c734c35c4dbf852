use super::{assert_shape, LinearOperator, OpRef, OperatorKind};
use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn in_dim(&self) -> usize {
        self.0
    }
    fn out_dim(&self) -> usize {
        self.0
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Identity
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        assert_shape(self, x.len(), out.len(), false);
        out.copy_from_slice(x);
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        assert_shape(self, y.len(), out.len(), true);
        out.copy_from_slice(y);
    }
}

#[derive(Debug, Clone)]
pub struct Diagonal(pub Vec<f64>);

impl LinearOperator for Diagonal {
    fn in_dim(&self) -> usize {
        self.0.len()
    }
    fn out_dim(&self) -> usize {
        self.0.len()
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Diagonal
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        assert_shape(self, x.len(), out.len(), false);
        for ((o, &xi), &d) in out.iter_mut().zip(x).zip(&self.0) {
            *o = d * xi;
        }
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        self.apply_into(y, out)
    }
}

/// The adjoint of an operator, e.g. zero-padding as `Adjoint(restriction)`.
#[derive(Debug, Clone)]
pub struct Adjoint<T>(pub T);

impl<T: LinearOperator> LinearOperator for Adjoint<T> {
    fn in_dim(&self) -> usize {
        self.0.out_dim()
    }
    fn out_dim(&self) -> usize {
        self.0.in_dim()
    }
    fn kind(&self) -> OperatorKind {
        self.0.kind()
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.0.adjoint_into(x, out)
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        self.0.apply_into(y, out)
    }
}

/// `outer ∘ inner`.
pub struct Composition {
    outer: OpRef,
    inner: OpRef,
}

pub fn compose(outer: OpRef, inner: OpRef) -> Result<Composition> {
    check_len("composition inner dimension", outer.in_dim(), inner.out_dim())?;
    Ok(Composition { outer, inner })
}

impl LinearOperator for Composition {
    fn in_dim(&self) -> usize {
        self.inner.in_dim()
    }
    fn out_dim(&self) -> usize {
        self.outer.out_dim()
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Composite
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let mut mid = vec![0.0; self.inner.out_dim()];
        self.inner.apply_into(x, &mut mid);
        self.outer.apply_into(&mid, out);
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        let mut mid = vec![0.0; self.inner.out_dim()];
        self.outer.adjoint_into(y, &mut mid);
        self.inner.adjoint_into(&mid, out);
    }
}

/// `bdiag_k(A)`: `A` applied to `k` contiguous input segments.
pub struct BlockDiagRepeat {
    block: OpRef,
    count: usize,
}

impl BlockDiagRepeat {
    pub fn new(block: OpRef, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParameter("block count must be at least 1".into()));
        }
        Ok(Self { block, count })
    }
}

impl LinearOperator for BlockDiagRepeat {
    fn in_dim(&self) -> usize {
        self.block.in_dim() * self.count
    }
    fn out_dim(&self) -> usize {
        self.block.out_dim() * self.count
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::BlockDiagonal
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        assert_shape(self, x.len(), out.len(), false);
        for (xs, os) in x
            .chunks_exact(self.block.in_dim())
            .zip(out.chunks_exact_mut(self.block.out_dim()))
        {
            self.block.apply_into(xs, os);
        }
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        assert_shape(self, y.len(), out.len(), true);
        for (ys, os) in y
            .chunks_exact(self.block.out_dim())
            .zip(out.chunks_exact_mut(self.block.in_dim()))
        {
            self.block.adjoint_into(ys, os);
        }
    }
}

/// Operators sharing an input space, outputs concatenated.
pub struct VStack {
    parts: Vec<OpRef>,
    in_dim: usize,
    out_dim: usize,
}

impl VStack {
    pub fn new(parts: Vec<OpRef>) -> Result<Self> {
        let in_dim = parts
            .first()
            .map(|p| p.in_dim())
            .ok_or_else(|| Error::InvalidParameter("empty operator stack".into()))?;
        for p in &parts {
            check_len("stacked operator input", in_dim, p.in_dim())?;
        }
        let out_dim = parts.iter().map(|p| p.out_dim()).sum();
        Ok(Self {
            parts,
            in_dim,
            out_dim,
        })
    }
}

impl LinearOperator for VStack {
    fn in_dim(&self) -> usize {
        self.in_dim
    }
    fn out_dim(&self) -> usize {
        self.out_dim
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Composite
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        assert_shape(self, x.len(), out.len(), false);
        let mut offset = 0;
        for p in &self.parts {
            let len = p.out_dim();
            p.apply_into(x, &mut out[offset..offset + len]);
            offset += len;
        }
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        assert_shape(self, y.len(), out.len(), true);
        out.iter_mut().for_each(|o| *o = 0.0);
        let mut tmp = vec![0.0; self.in_dim];
        let mut offset = 0;
        for p in &self.parts {
            let len = p.out_dim();
            p.adjoint_into(&y[offset..offset + len], &mut tmp);
            out.iter_mut().zip(&tmp).for_each(|(o, t)| *o += t);
            offset += len;
        }
    }
}
