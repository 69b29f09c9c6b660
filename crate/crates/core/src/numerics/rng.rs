use rand::{Rng, RngExt, SeedableRng};
use rand_xoshiro::SplitMix64;

use super::Tensor;

/// Algorithm identifier written into checkpoint headers.
pub const PRNG_ID: &str = "splitmix64";

/// Root generator that hands out independent child streams, one per
/// consumer (parameter tensor, shuffler), in a fixed order.
#[derive(Debug, Clone)]
pub struct SeedStream(SplitMix64);

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        SeedStream(SplitMix64::seed_from_u64(seed))
    }

    pub fn split(&mut self) -> SplitMix64 {
        SplitMix64::seed_from_u64(self.0.next_u64())
    }
}

/// Fills `t` with draws from `uniform(-scale, scale)`.
pub fn fill_uniform(t: &mut Tensor, rng: &mut SplitMix64, scale: f64) {
    for v in t.data_mut() {
        *v = rng.random_range(-scale..scale);
    }
}
