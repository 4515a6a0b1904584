//! Small sampling helpers shared by the sketch and solver modules.

use rand_core::RngCore;

/// Uniform draw from `[0, 1)` with 53 bits of precision.
#[inline]
pub(crate) fn unit_uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    (rng.next_u64() >> 11) as f64 * SCALE
}

/// Unbiased uniform index in `[0, n)` via rejection sampling.
#[inline]
pub(crate) fn uniform_index<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> usize {
    debug_assert!(n > 0);
    let n = n as u64;
    // Largest u64 below which `x % n` is exactly uniform.
    let limit = u64::MAX - (u64::MAX % n + 1) % n;
    loop {
        let x = rng.next_u64();
        if x <= limit {
            return (x % n) as usize;
        }
    }
}
