use super::{assert_shape, LinearOperator, OperatorKind};
use crate::error::{Error, Result};

/// Selects `kept[i]` of a length-`full` vector into slot `i`.
///
/// The kept indices need not be sorted, only distinct, so a restriction can
/// also reorder. Its adjoint scatters back and zero-fills the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    kept: Vec<usize>,
    full: usize,
}

impl Restriction {
    pub fn new(kept: Vec<usize>, full: usize) -> Result<Self> {
        let mut seen = vec![false; full];
        for &k in &kept {
            if k >= full {
                return Err(Error::InvalidParameter(format!(
                    "restriction index {k} out of range {full}"
                )));
            }
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::InvalidParameter(format!("duplicate restriction index {k}")));
            }
        }
        Ok(Self { kept, full })
    }

    /// Keeps the leading `kept` entries.
    pub fn leading(kept: usize, full: usize) -> Result<Self> {
        Self::new((0..kept).collect(), full)
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn full_len(&self) -> usize {
        self.full
    }

    /// The indices not kept, ascending.
    pub fn complement(&self) -> Restriction {
        let mut keep = vec![true; self.full];
        for &k in &self.kept {
            keep[k] = false;
        }
        let kept = (0..self.full).filter(|&i| keep[i]).collect();
        Restriction {
            kept,
            full: self.full,
        }
    }

    /// Boolean membership of each full-length index.
    pub fn membership(&self) -> Vec<bool> {
        let mut m = vec![false; self.full];
        for &k in &self.kept {
            m[k] = true;
        }
        m
    }
}

impl LinearOperator for Restriction {
    fn in_dim(&self) -> usize {
        self.full
    }
    fn out_dim(&self) -> usize {
        self.kept.len()
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Restriction
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        assert_shape(self, x.len(), out.len(), false);
        for (o, &k) in out.iter_mut().zip(&self.kept) {
            *o = x[k];
        }
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        assert_shape(self, y.len(), out.len(), true);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (&v, &k) in y.iter().zip(&self.kept) {
            out[k] = v;
        }
    }
}
