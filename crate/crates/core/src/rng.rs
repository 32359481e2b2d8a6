//! Counter-addressable Gaussian streams.
//!
//! A stream is a ChaCha8 keystream selected by `(seed, stream)`; the `i`-th
//! normal variate of a stream lives at a fixed keystream position, so any
//! path can be regenerated on its own and in any order.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 32-bit keystream words consumed per pair of normals.
const WORDS_PER_PAIR: u128 = 4;

#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

/// `(0, 1]` from the top 53 bits.
fn open_unit(x: u64) -> f64 {
    ((x >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl NormalStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, spare: None }
    }

    /// Stream positioned so that the next variate is number `index`.
    pub fn at(seed: u64, stream: u64, index: u64) -> Self {
        let mut s = Self::new(seed, stream);
        s.rng.set_word_pos(u128::from(index / 2) * WORDS_PER_PAIR);
        if index % 2 == 1 {
            s.next_normal();
        }
        s
    }

    /// Box–Muller pair.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = open_unit(self.rng.next_u64());
        let u2 = open_unit(self.rng.next_u64());
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let (s, c) = libm::sincos(2.0 * core::f64::consts::PI * u2);
        (r * c, r * s)
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(x) = self.spare.take() {
            return x;
        }
        let (a, b) = self.normal_pair();
        self.spare = Some(b);
        a
    }

    pub fn fill(&mut self, out: &mut [f64], scale: f64) {
        for x in out {
            *x = self.next_normal() * scale;
        }
    }
}
