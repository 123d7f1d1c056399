//! Seeded random streams.
//!
//! Every stream is a ChaCha8 generator (`rand_chacha::ChaCha8Rng`) keyed by
//! `seed_from_u64(seed)` and selected by `set_stream(stream)`. ChaCha is a
//! counter-based cipher, so a `(seed, stream)` pair names the same sequence on
//! every platform and substreams never overlap.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

pub type StreamRng = ChaCha8Rng;

/// Generator for substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard complex Gaussian with `E[z] = 0` and `E[|z|^2] = 1`.
///
/// Box-Muller in polar form: modulus `sqrt(-ln u1)` and uniform phase. Always
/// consumes exactly two uniforms, so stream positions stay aligned with the
/// trial index.
#[inline]
pub fn standard_complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    // gen::<f64>() is in [0, 1); 1 - u is in (0, 1] so the log is finite.
    let u1 = 1.0 - rng.gen::<f64>();
    let u2 = rng.gen::<f64>();
    let radius = (-u1.ln()).sqrt();
    let (s, c) = sin_cos_turns(u2);
    Complex64::new(radius * c, radius * s)
}

/// `(sin, cos)` of `2 pi t` for `t` in `[0, 1]`.
///
/// Exact quadrant reduction followed by Taylor polynomials on
/// `[-pi/4, pi/4]` (truncation error below 1e-18), using only basic IEEE
/// arithmetic so results do not depend on the platform math library.
#[inline]
pub fn sin_cos_turns(t: f64) -> (f64, f64) {
    // Truncating cast instead of `round`, which is a libm call on baseline x86-64.
    let quadrant = (t * 4.0 + 0.5) as i64;
    let x = TAU * (t - quadrant as f64 * 0.25);
    let x2 = x * x;
    let sin = x * (1.0
        + x2 * (-1.0 / 6.0
            + x2 * (1.0 / 120.0
                + x2 * (-1.0 / 5040.0
                    + x2 * (1.0 / 362_880.0
                        + x2 * (-1.0 / 39_916_800.0
                            + x2 * (1.0 / 6_227_020_800.0
                                + x2 * (-1.0 / 1_307_674_368_000.0
                                    + x2 * (1.0 / 355_687_428_096_000.0)))))))));
    let cos = 1.0
        + x2 * (-0.5
            + x2 * (1.0 / 24.0
                + x2 * (-1.0 / 720.0
                    + x2 * (1.0 / 40_320.0
                        + x2 * (-1.0 / 3_628_800.0
                            + x2 * (1.0 / 479_001_600.0
                                + x2 * (-1.0 / 87_178_291_200.0
                                    + x2 * (1.0 / 20_922_789_888_000.0))))))));
    match quadrant & 3 {
        0 => (sin, cos),
        1 => (cos, -sin),
        2 => (-sin, -cos),
        _ => (-cos, sin),
    }
}
