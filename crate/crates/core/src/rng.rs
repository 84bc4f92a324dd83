//! Seeded random streams.
//!
//! Every consumer of randomness draws from its own ChaCha stream derived from
//! a single `u64` seed, so independent actors (Alice, Bob, the channel, Eve)
//! never share a sequence and runs are reproducible bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub const ALICE: u64 = 1;
pub const BOB: u64 = 2;
pub const CHANNEL: u64 = 3;
pub const EVE: u64 = 4;
pub const CHECK: u64 = 5;

pub fn stream(seed: u64, id: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// SplitMix64 finalizer, used to spread small integers (grid indices) over the seed space.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
