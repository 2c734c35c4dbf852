use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// One `±1` symbol grid per snapshot, sized `(n + m - 1)` per axis so the
/// sensor sees every angle of the scene.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedAperture {
    patterns: Vec<Array2<f64>>,
    seed: u64,
}

pub fn generate_aperture(
    cube: (usize, usize),
    sensor: (usize, usize),
    snapshots: usize,
    seed: u64,
) -> Result<CodedAperture> {
    if cube.0 == 0 || cube.1 == 0 || sensor.0 == 0 || sensor.1 == 0 || snapshots == 0 {
        return Err(Error::InvalidParameter("aperture dimensions must be positive".into()));
    }
    let shape = (cube.0 + sensor.0 - 1, cube.1 + sensor.1 - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let patterns = (0..snapshots)
        .map(|_| Array2::from_shape_simple_fn(shape, || if rng.random::<bool>() { 1.0 } else { -1.0 }))
        .collect();
    Ok(CodedAperture { patterns, seed })
}

impl CodedAperture {
    /// Wraps explicit patterns, which must share a shape.
    pub fn from_patterns(patterns: Vec<Array2<f64>>, seed: u64) -> Result<Self> {
        let first = patterns
            .first()
            .ok_or_else(|| Error::InvalidParameter("no aperture patterns".into()))?
            .dim();
        if first.0 == 0 || first.1 == 0 || patterns.iter().any(|p| p.dim() != first) {
            return Err(Error::InvalidParameter("aperture patterns must share a nonempty shape".into()));
        }
        Ok(Self { patterns, seed })
    }

    pub fn shape(&self) -> (usize, usize) {
        self.patterns[0].dim()
    }

    pub fn snapshots(&self) -> usize {
        self.patterns.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn pattern(&self, p: usize) -> &Array2<f64> {
        &self.patterns[p]
    }

    pub fn patterns(&self) -> &[Array2<f64>] {
        &self.patterns
    }

    /// The physical `{0, 1}` transmittance `S₊ = (S + 1) / 2` of snapshot `p`.
    pub fn open_cells(&self, p: usize) -> Array2<f64> {
        self.patterns[p].mapv(|s| 0.5 * (s + 1.0))
    }
}
