use ndarray::Array2;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::Fft2;

fn valid_shape(kernel: (usize, usize), image: (usize, usize)) -> Result<(usize, usize)> {
    if image.0 == 0 || image.1 == 0 || image.0 > kernel.0 || image.1 > kernel.1 {
        return Err(Error::InvalidParameter(format!(
            "valid convolution of {kernel:?} with {image:?} is empty"
        )));
    }
    Ok((kernel.0 - image.0 + 1, kernel.1 - image.1 + 1))
}

/// Valid 2-D convolution `kernel *̄ image` by direct summation:
/// `out[i, j] = Σ_{a,b} image[a, b] kernel[i + n_u - 1 - a, j + n_v - 1 - b]`.
pub fn valid_convolve_direct(kernel: &Array2<f64>, image: &Array2<f64>) -> Result<Array2<f64>> {
    let (mu, mv) = valid_shape(kernel.dim(), image.dim())?;
    let (nu, nv) = image.dim();
    Ok(Array2::from_shape_fn((mu, mv), |(i, j)| {
        let mut acc = 0.0;
        for a in 0..nu {
            for b in 0..nv {
                acc += image[[a, b]] * kernel[[i + nu - 1 - a, j + nv - 1 - b]];
            }
        }
        acc
    }))
}

/// Valid 2-D convolution through an `s_u x s_v` circular convolution of the
/// zero-padded image, restricted to the fully overlapping window.
pub fn valid_convolve_fft(kernel: &Array2<f64>, image: &Array2<f64>) -> Result<Array2<f64>> {
    let (mu, mv) = valid_shape(kernel.dim(), image.dim())?;
    let (su, sv) = kernel.dim();
    let (nu, nv) = image.dim();
    let fft = Fft2::new(su, sv);
    let mut k: Vec<Complex64> = kernel.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut x = vec![Complex64::new(0.0, 0.0); su * sv];
    for ((a, b), &v) in image.indexed_iter() {
        x[a * sv + b] = Complex64::new(v, 0.0);
    }
    fft.forward(&mut k);
    fft.forward(&mut x);
    x.iter_mut().zip(&k).for_each(|(a, b)| *a *= b);
    fft.inverse(&mut x);
    let scale = 1.0 / (su * sv) as f64;
    Ok(Array2::from_shape_fn((mu, mv), |(i, j)| {
        x[(nu - 1 + i) * sv + nv - 1 + j].re * scale
    }))
}
