//! Iterative radix-2 FFT.
//!
//! Forward transform is `X_k = Σ_j x_j e^{−2πi jk/n}`; neither direction is
//! normalised.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn fft(data: &mut [Complex64]) -> Result<()> {
    transform(data, -1.0)
}

pub fn ifft(data: &mut [Complex64]) -> Result<()> {
    transform(data, 1.0)
}

fn transform(data: &mut [Complex64], sign: f64) -> Result<()> {
    let n = data.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidArgument("FFT length must be a power of two"));
    }
    let bits = n.trailing_zeros();
    if bits == 0 {
        return Ok(());
    }
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let tau = sign * 2.0 * core::f64::consts::PI / n as f64;
    let twiddle: Vec<Complex64> = (0..n / 2).map(|k| Complex64::from_polar(1.0, tau * k as f64)).collect();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let a = data[start + k];
                let b = data[start + k + half] * twiddle[k * stride];
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum() {
        let n = 16;
        let x: Vec<Complex64> = (0..n).map(|j| Complex64::new((j as f64).sin(), (j * j) as f64 * 0.1)).collect();
        let mut y = x.clone();
        fft(&mut y).unwrap();
        for k in 0..n {
            let direct: Complex64 = (0..n)
                .map(|j| x[j] * Complex64::from_polar(1.0, -2.0 * core::f64::consts::PI * (j * k) as f64 / n as f64))
                .sum();
            assert!((direct - y[k]).norm() < 1e-12);
        }
        ifft(&mut y).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b / n as f64).norm() < 1e-14);
        }
        assert!(fft(&mut [Complex64::new(0.0, 0.0); 3]).is_err());
    }
}
