//! Seeded complex Gaussian generation.
//!
//! Every Monte-Carlo realization owns two counter-based ChaCha8 streams derived
//! from a master seed: stream `2i` feeds the propagation channels and stream
//! `2i + 1` feeds the pilot-phase noise. A realization therefore depends only
//! on `(seed, i)`, never on which worker ran it or in which order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Draws one circularly-symmetric `CN(0, variance)` sample.
///
/// Real and imaginary parts are independent `N(0, variance / 2)`.
#[inline]
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let scale = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}

/// Fills `out` with i.i.d. `CN(0, variance)` samples, in slice order.
pub fn fill_complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64, out: &mut [Complex64]) {
    let scale = (0.5 * variance).sqrt();
    for z in out.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *z = Complex64::new(scale * re, scale * im);
    }
}

/// The pair of independent streams used by realization `index`.
pub struct RealizationStreams {
    pub channel: ChaCha8Rng,
    pub pilot: ChaCha8Rng,
}

impl RealizationStreams {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut channel = ChaCha8Rng::seed_from_u64(seed);
        channel.set_stream(2 * index);
        let mut pilot = ChaCha8Rng::seed_from_u64(seed);
        pilot.set_stream(2 * index + 1);
        Self { channel, pilot }
    }
}
