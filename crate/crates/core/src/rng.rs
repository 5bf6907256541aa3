//! Counter-based random streams.
//!
//! Every Monte Carlo sample owns the ChaCha8 stream `(seed, sample_index)`,
//! so results do not depend on how samples are spread over worker threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Stream for sample `index` under `seed`.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Stream for an auxiliary purpose `tag`, independent of [`sample_stream`].
pub fn tagged_stream(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mixed = seed ^ tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    sample_stream(mixed, index)
}

/// Standard complex Gaussian: independent real and imaginary parts with
/// variance 1/2, density `e^{-|z|²}/π`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    Complex64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
}
