//! Per-replication seed derivation.

/// Golden-ratio increment of SplitMix64.
pub const SEED_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function (Stafford variant 13).
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `index` under `base_seed`: the `(index + 1)`-th
/// SplitMix64 output of a generator seeded with `base_seed`.
pub fn replication_seed(base_seed: u64, index: u64) -> u64 {
    splitmix64(base_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(SEED_GAMMA)))
}

/// Seed derived from a base seed and a list of coordinates, folded left to
/// right with [`replication_seed`].
pub fn derive_seed(base_seed: u64, coordinates: &[u64]) -> u64 {
    coordinates.iter().fold(base_seed, |seed, &c| replication_seed(seed, c))
}
