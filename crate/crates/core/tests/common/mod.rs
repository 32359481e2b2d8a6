#![allow(dead_code)]

use loewner_core::rng::NormalStream;
use loewner_core::scalar::{exact_complex, Exact};
use loewner_core::{Complex64, SchlichtCoefficients};

pub fn gaussian_vec(seed: u64, n: usize, scale: f64) -> Vec<Complex64> {
    let mut s = NormalStream::new(seed, 0);
    (0..n).map(|_| Complex64::new(s.next_normal(), s.next_normal()) * scale).collect()
}

/// Random point with `‖c‖ = norm`.
pub fn random_point(seed: u64, n: usize, norm: f64) -> SchlichtCoefficients {
    let v = gaussian_vec(seed, n, 1.0);
    let len = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    SchlichtCoefficients::new(v.into_iter().map(|z| z * (norm / len)).collect()).unwrap()
}

/// Random small rationals.
pub fn random_exact(seed: u64, n: usize) -> SchlichtCoefficients<Exact> {
    let mut s = NormalStream::new(seed, 1);
    let mut q = || {
        let num = (s.next_normal() * 5.0).round() as i64;
        let den = 1 + (s.next_normal().abs() * 4.0) as i64;
        (num, den)
    };
    SchlichtCoefficients::new((0..n).map(|_| exact_complex(q(), q())).collect()).unwrap()
}
