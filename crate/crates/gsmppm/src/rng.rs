//! Deterministic, splittable random-number streams.
//!
//! Every stochastic operation in this crate takes an explicit [`Stream`].
//! Streams are cheap value types derived from a root seed by pure counter
//! mixing, so any worker can recompute the stream for "frame 17 322 of SNR
//! point 3" without coordination, and results do not depend on thread
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A position in the space of deterministic random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Stream {
    state: u64,
}

impl Stream {
    /// Stream at the root of the derivation tree for `seed`.
    pub fn root(seed: u64) -> Self {
        Stream {
            state: splitmix64(seed ^ 0x6a09_e667_f3bc_c908),
        }
    }

    /// Derive the `label`-th child stream. Distinct labels give decorrelated
    /// streams; the same `(root, labels...)` path always gives the same
    /// stream.
    pub fn child(self, label: u64) -> Self {
        let mixed = splitmix64(label ^ 0xbb67_ae85_84ca_a73b);
        Stream {
            state: splitmix64(self.state.wrapping_add(mixed).rotate_left(17)),
        }
    }

    /// Instantiate the generator for this stream.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.state)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
