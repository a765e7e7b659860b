//! Seeded random substreams.
//!
//! A [`RandomSource`] is a `(seed, stream_id)` pair. Work items ask for a
//! generator keyed by their own coordinates (for example `(group, replica)`),
//! so the numbers a work item sees never depend on scheduling.
//!
//! The coordinates are folded into a 64-bit key with the SplitMix64
//! finalizer, and the key seeds a SplitMix64 generator (Steele, Lea and
//! Flood's splittable generator). Seeding costs four finalizer rounds, which
//! matters because the permutation test opens one substream per group and
//! replica.

use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

pub type SubstreamRng = SplitMix64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomSource {
    pub seed: u64,
    pub stream_id: u64,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed, stream_id: 0 }
    }

    /// A source for an independent stream with the same seed.
    pub fn with_stream(self, stream_id: u64) -> Self {
        RandomSource { stream_id, ..self }
    }

    /// Generator for the work item at coordinates `(a, b)` of this stream.
    pub fn substream(&self, a: u64, b: u64) -> SubstreamRng {
        let mut h = mix64(self.seed ^ GOLDEN);
        for word in [self.stream_id, a, b] {
            h = mix64(h.wrapping_add(GOLDEN) ^ word);
        }
        SplitMix64::seed_from_u64(h)
    }

    /// Generator for single-use draws on this stream.
    pub fn rng(&self) -> SubstreamRng {
        self.substream(u64::MAX, u64::MAX)
    }
}
