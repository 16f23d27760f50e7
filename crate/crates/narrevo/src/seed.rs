//! Replication seeds.
//!
//! `derive_seed` absorbs the master seed, the cell index and the replication
//! index one word at a time, running the SplitMix64 finalizer after each
//! word. Every step is a bijection on `u64` for a fixed prefix, so two
//! replications of the same cell never share a seed, and swapping the
//! indices changes the result.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn absorb(state: u64, word: u64) -> u64 {
    mix(state.wrapping_add(GOLDEN_GAMMA) ^ word)
}

/// Seed for replication `rep_index` of cell `cell_index`.
pub fn derive_seed(master_seed: u64, cell_index: u64, rep_index: u64) -> u64 {
    let s = absorb(mix(master_seed), cell_index);
    absorb(s, rep_index)
}
