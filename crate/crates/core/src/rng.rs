//! Seeded random streams.
//!
//! All simulations draw from ChaCha8 keyed by a 64-bit seed. Separate
//! concerns within one run (initial placement, lattice dynamics, lottery)
//! read from separate ChaCha streams of the same key, so switching one
//! layer off never perturbs the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream used for initial placement of agents.
pub const STREAM_PLACEMENT: u64 = 0;
/// Stream used by the Schelling relocation dynamic.
pub const STREAM_DYNAMICS: u64 = 1;
/// Stream used by the money-exchange lottery.
pub const STREAM_LOTTERY: u64 = 2;

pub fn stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
