//! Deterministic 64-bit seed derivation.
//!
//! Every randomized component derives its stream as
//! `mix(master, part_1, part_2, …)` where each step is one round of
//! splitmix64 applied to the running state XOR the next part. The chain is
//! documented here because reproducibility contracts (byte-identical CSV,
//! identical recovery reports) depend on it.

/// One splitmix64 round.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Fold the parts into `master`, one splitmix64 round per part.
pub fn mix(master: u64, parts: &[u64]) -> u64 {
    let mut state = splitmix64(master);
    for &p in parts {
        state = splitmix64(state ^ p);
    }
    state
}
