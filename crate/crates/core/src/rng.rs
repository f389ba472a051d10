//! Keyed random streams.
//!
//! Every random draw in a simulation comes from a stream whose seed is a pure
//! function of a key path: master seed, then trial index, then purpose, block,
//! node and codeword index as needed. Streams are therefore independent of the
//! order in which trials or blocks are executed.
//!
//! Derivation, byte-exact:
//!
//! ```text
//! mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!          z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!          z ^ (z >> 31)                              (all arithmetic mod 2^64)
//! child(parent, label) = mix(parent + 0x9E3779B97F4A7C15 * (label + 1))
//! trial_seed(master, t) = child(master, t)
//! ```
//!
//! A key is turned into a generator with `Xoshiro256PlusPlus::seed_from_u64`.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type StreamRng = Xoshiro256PlusPlus;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 output finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn child(parent: u64, label: u64) -> u64 {
    mix(parent.wrapping_add(GOLDEN.wrapping_mul(label.wrapping_add(1))))
}

pub fn trial_seed(master: u64, trial: u64) -> u64 {
    child(master, trial)
}

/// What a stream is used for. The discriminant is the key label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Messages = 1,
    Codebook = 2,
    Channel = 3,
    CodebookU = 4,
    CodebookV = 5,
}

/// A position in the key tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn new(seed: u64) -> StreamKey {
        StreamKey(seed)
    }

    pub fn purpose(self, p: Purpose) -> StreamKey {
        StreamKey(child(self.0, p as u64))
    }

    pub fn with(self, label: u64) -> StreamKey {
        StreamKey(child(self.0, label))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn rng(self) -> StreamRng {
        Xoshiro256PlusPlus::seed_from_u64(self.0)
    }
}
