//! Deterministic RNG substreams derived from a root seed by counter
//! mixing, so that every (slot, pair, purpose) draw site gets its own
//! stream. Keeping ground-link generation on its own streams makes runs
//! with and without satellite lightpaths share the same ground randomness
//! for paired comparisons.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tag of a substream, kept stable across plan changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Elementary generation on a fiber edge: (slot, pair, edge).
    FiberGeneration,
    /// Elementary generation on a lightpath edge: (slot, pair, edge).
    LightpathGeneration,
    /// Swap attempt outcomes: (slot, triple).
    Swap,
    /// Lightpath rounding trials.
    Rounding,
    /// Scenario setup sampling (populations, swap probabilities, lenses).
    Setup,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::FiberGeneration => 1,
            Stream::LightpathGeneration => 2,
            Stream::Swap => 3,
            Stream::Rounding => 4,
            Stream::Setup => 5,
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable 64-bit key for name-like identities (station pairs, triples), so
/// substream derivation does not depend on interning order.
pub fn stable_key(parts: &[&str]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for part in parts {
        for b in part.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h ^= 0x1f;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derives the substream for `(root_seed, stream, counters)`. Same inputs,
/// same stream, always.
pub fn substream(root_seed: u64, stream: Stream, counters: &[u64]) -> ChaCha8Rng {
    let mut state = splitmix(root_seed ^ 0x5851_f42d_4c95_7f2d);
    state = splitmix(state ^ stream.tag());
    for c in counters {
        state = splitmix(state ^ c.wrapping_mul(0x2545_f491_4f6c_dd1d));
    }
    ChaCha8Rng::seed_from_u64(state)
}
