use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::Complex;

/// Independent ChaCha8 stream for `(seed, stream)`.
///
/// Generation and Monte-Carlo loops key one stream per snapshot or per trial, so the
/// draws never depend on how work is split between threads.
pub(crate) fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Circularly-symmetric complex Gaussian with unit variance, split evenly between
/// real and imaginary parts.
pub(crate) fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}
