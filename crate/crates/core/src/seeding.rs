//! Deterministic seed derivation for parallel Monte-Carlo work.
//!
//! Every randomized operation in this crate derives per-task seeds from a
//! master seed and a task index, so results are reproducible bit-for-bit
//! regardless of how many worker threads execute the tasks.

/// SplitMix64 output mixing step.
///
/// Finalizer from Steele et al.'s SplitMix generator; full-period and
/// platform-independent, which is all seed derivation needs.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed for sub-stream `stream` of `master`.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(master) ^ splitmix64(stream.wrapping_add(1)))
}

/// Derive the seed for a two-level sub-stream `(a, b)` of `master`.
pub fn derive_seed2(master: u64, a: u64, b: u64) -> u64 {
    derive_seed(derive_seed(master, a), b)
}
