//! Seeded randomness with pinned stream semantics.
//!
//! Every random choice in this crate flows through the helpers here so that a
//! seed fully determines the output on every platform:
//!
//! * the generator is xoshiro256++, seeded from a 64-bit value through
//!   SplitMix64 (the generator's reference seeding procedure);
//! * a tie-break among `k` survivors consumes exactly one 64-bit draw,
//!   reduced modulo `k`;
//! * independent streams (one per simulated frame, one per ensemble member)
//!   are derived by SplitMix64-mixing the base seed with the stream index.

use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub use rand_xoshiro::rand_core::Rng;

pub type ConstructionRng = Xoshiro256PlusPlus;

pub fn rng_from_seed(seed: u64) -> ConstructionRng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Uniform index into `0..len`: one 64-bit draw reduced modulo `len`.
/// The modulo bias is below `len / 2^64`, irrelevant at the survivor-set
/// sizes that occur here, and the draw count stays predictable.
pub fn uniform_index(rng: &mut impl Rng, len: usize) -> usize {
    debug_assert!(len > 0);
    (rng.next_u64() % len as u64) as usize
}

/// SplitMix64 output function.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed of an independent stream from a base seed and up to two
/// stream coordinates. Thread-count independent by construction.
pub fn derive_stream_seed(base: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(base ^ splitmix64(a)) ^ splitmix64(b.wrapping_add(0x1234_5678_9abc_def0)))
}

/// Standard normal draws via Box-Muller on two uniform draws, caching the
/// paired value. Hand-rolled so the byte stream never depends on an external
/// crate's sampling internals.
pub struct GaussianSource {
    rng: ConstructionRng,
    spare: Option<f64>,
}

impl GaussianSource {
    pub fn new(seed: u64) -> Self {
        GaussianSource {
            rng: rng_from_seed(seed),
            spare: None,
        }
    }

    fn unit_open(&mut self) -> f64 {
        // 53-bit mantissa shifted into (0, 1): never exactly 0 or 1.
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.unit_open();
        let u2 = self.unit_open();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}
