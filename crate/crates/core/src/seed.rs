//! Stable seed derivation.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a tuple of integers into one 64-bit seed. Order-sensitive; equal
/// tuples always give equal seeds.
pub fn stable_mix(parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix(parts.len() as u64), |acc, &p| {
        splitmix(acc.wrapping_add(GOLDEN) ^ splitmix(p.wrapping_add(GOLDEN)))
    })
}
