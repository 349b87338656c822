//! Stateless seed derivation for disorder realizations.
//!
//! `derive_seed(master, w, i)` packs `(w, i)` into one 64-bit key
//! `w << 32 | i`, mixes it with the master seed through an odd-multiplier
//! Weyl step, and finishes with the SplitMix64 output function:
//!
//! ```text
//! key  = (w_index << 32) | realization
//! z    = master + (key + 1) * 0x9E3779B97F4A7C15      (wrapping)
//! z    = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z    = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! seed = z ^ (z >> 31)
//! ```
//!
//! Every step is a bijection of `u64`, so for a fixed master seed two grid
//! points with indices below `2^32` never share a seed.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master_seed: u64, w_index: u32, realization: u32) -> u64 {
    let key = ((w_index as u64) << 32) | realization as u64;
    splitmix64_mix(master_seed.wrapping_add(key.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}
