//! FFT-backed transforms: 2-D complex DFT and the orthonormal DCT-II.

mod dct;
mod fft2;

pub use dct::{Dct, Dct2d};
pub use fft2::Fft2;
