//! Keyed counter-based randomness.
//!
//! Every draw is a pure function of its key tuple, built from chained
//! splitmix64 finalizers. There is no generator state to share or hand off,
//! so sampling loops can run in any order (or in parallel) and still produce
//! bitwise-identical results for a fixed seed.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a `(seed, stream, counter)` key into 64 uniform bits.
#[inline]
pub(crate) fn mix3(seed: u64, stream: u64, counter: u64) -> u64 {
    let mut z = splitmix(seed.wrapping_add(GOLDEN));
    z = splitmix(z ^ stream.wrapping_mul(0xD134_2543_DE82_EF95).wrapping_add(GOLDEN));
    splitmix(z ^ counter.wrapping_mul(0xA076_1D64_78BD_642F).wrapping_add(GOLDEN))
}

/// Uniform in `[0, 1)` with 53 bits of precision.
#[inline]
pub(crate) fn unit_f64(seed: u64, stream: u64, counter: u64) -> f64 {
    (mix3(seed, stream, counter) >> 11) as f64 / (1u64 << 53) as f64
}

/// Standard normal by Box-Muller; `counter` pairs draw independent values.
pub(crate) fn normal_f64(seed: u64, stream: u64, counter: u64) -> f64 {
    // u1 in (0, 1] so the log never sees zero
    let u1 = ((mix3(seed, stream, 2 * counter) >> 11) as f64 + 1.0) / (1u64 << 53) as f64;
    let u2 = unit_f64(seed, stream, 2 * counter + 1);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
