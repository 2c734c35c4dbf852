//! Volume inpainting acquisition: every band is upsampled to the sensor grid,
//! then each pixel keeps the band of its Fabry-Perot filter.

mod lanczos;
mod operator;

pub use lanczos::{Resampler1d, UpsamplingOperator, LANCZOS_ORDER};
pub use operator::{msvi_subsampling_rate, MsviOperator};
