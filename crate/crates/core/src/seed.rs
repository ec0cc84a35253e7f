//! Deterministic derivation of independent random streams.
//!
//! Every random draw in the toolkit comes from a generator keyed by
//! `(seed, domain, index)`, so results never depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const DOMAIN_SPLIT: u64 = 1;
pub(crate) const DOMAIN_COLLECTION: u64 = 2;
pub(crate) const DOMAIN_BASELINE: u64 = 3;
pub(crate) const DOMAIN_SYNTH_DOC: u64 = 4;
pub(crate) const DOMAIN_SYNTH_LAYOUT: u64 = 5;

// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn derive(seed: u64, domain: u64, index: u64) -> u64 {
    mix(mix(mix(seed) ^ domain) ^ index)
}

pub(crate) fn stream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, domain, index))
}
