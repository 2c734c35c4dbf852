//! Spatio-spectral analysis prior: `A = A_uv ⊗ A_λ = Ω Ã` with `Ã* Ã = Id`.
//!
//! `A_uv` is a 2-D undecimated wavelet transform (periodic boundaries) whose
//! final approximation band is further mapped by an orthonormal 2-D DCT;
//! `A_λ` is the orthonormal DCT-II along the spectral axis.

mod transform;
mod wavelet;

pub use transform::{AnalysisConfig, AnalysisTransform, ExtendedAnalysis};
pub(crate) use transform::weighted_l1;
pub use wavelet::{FilterNormalization, Udwt2, WaveletFilter};
