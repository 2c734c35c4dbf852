//! Random-convolution acquisition: an out-of-focus coded aperture convolves
//! each band (possibly blurred by diffraction) before the spectral mask.

mod aperture;
mod convolution;
mod diffraction;
mod operator;
mod sizing;

pub use aperture::{generate_aperture, CodedAperture};
pub use convolution::{valid_convolve_direct, valid_convolve_fft};
pub use diffraction::{diffract_pattern, DiffractionKernel, Optics, MASS_FRACTION};
pub use operator::{pattern_equivalence_check, MsrcOperator, PatternEquivalence};
pub use sizing::SizingReport;
