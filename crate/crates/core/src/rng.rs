//! Named, independent random streams.
//!
//! Every phase of a run draws from its own ChaCha stream derived from the run
//! seed, so changing how one phase consumes randomness (e.g. switching the
//! recommendation policy) never shifts the draws of another phase.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Population = 1,
    Graph = 2,
    Creation = 3,
    Request = 4,
    Scoring = 5,
    Interaction = 6,
}

pub fn stream(seed: u64, which: Stream) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}
