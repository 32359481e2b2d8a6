//! Seeded test points.

use loewner_core::rng::NormalStream;
use loewner_core::scalar::{exact_complex, Exact};
use loewner_core::{Complex64, SchlichtCoefficients};

use crate::error::Result;

pub fn gaussian_vec(seed: u64, stream: u64, n: usize, scale: f64) -> Vec<Complex64> {
    let mut s = NormalStream::new(seed, stream);
    (0..n).map(|_| Complex64::new(s.next_normal(), s.next_normal()) * scale).collect()
}

/// Gaussian direction scaled to `‖c‖ = norm`.
pub fn random_point(seed: u64, stream: u64, n: usize, norm: f64) -> Result<SchlichtCoefficients> {
    let v = gaussian_vec(seed, stream, n, 1.0);
    let len = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(SchlichtCoefficients::new(v.into_iter().map(|z| z * (norm / len)).collect())?)
}

/// Rationals `a/b` with `|a| ≲ 10`, `1 ≤ b ≤ 8`.
pub fn random_exact(seed: u64, stream: u64, n: usize) -> Result<SchlichtCoefficients<Exact>> {
    let mut s = NormalStream::new(seed, stream);
    let mut q = || {
        let num = (s.next_normal() * 4.0).round() as i64;
        let den = 1 + (s.next_normal().abs() * 3.0).min(7.0) as i64;
        (num, den)
    };
    Ok(SchlichtCoefficients::new((0..n).map(|_| exact_complex(q(), q())).collect())?)
}
