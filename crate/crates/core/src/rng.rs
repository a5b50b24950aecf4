//! Seeded random streams.
//!
//! Every consumer of randomness gets its own ChaCha stream derived from the
//! master seed and a fixed stream label, so adding or reordering consumers
//! never perturbs the draws seen by others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub mod stream {
    pub const DEMAND: u64 = 1;
    pub const EPISODE: u64 = 2;
    pub const SIM: u64 = 3;
    pub const WORLD: u64 = 4;
    pub const INIT: u64 = 0x100;
    pub const NOISE: u64 = 0x200;
    pub const REPLAY: u64 = 0x300;
}

/// Independent stream `label` (+ `index`, for per-agent streams) of `seed`.
pub fn split(seed: u64, label: u64, index: u64) -> Rng {
    let mut rng = Rng::seed_from_u64(seed);
    rng.set_stream(label.wrapping_mul(0x1_0000).wrapping_add(index));
    rng
}
