//! Stable seed derivation.
//!
//! Every seed in the system is derived from a master seed by the functions in
//! this module. They are fixed arithmetic (splitmix64 finalizer and FNV-1a over
//! bytes), so derived seeds stay identical across platforms, compiler versions
//! and releases.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// splitmix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combines two seeds; not commutative.
pub fn mix(a: u64, b: u64) -> u64 {
    splitmix64(a ^ splitmix64(b.wrapping_add(0x632b_e59b_d9b4_e019)))
}

/// FNV-1a hash of a string, finalized with splitmix64.
pub fn hash_str(s: &str) -> u64 {
    let mut h = FNV_OFFSET;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    splitmix64(h)
}

/// Seed for a labelled sub-stream of `base`, e.g. `derive(master, &["run", scenario, policy])`.
pub fn derive(base: u64, labels: &[&str]) -> u64 {
    labels.iter().fold(base, |acc, l| mix(acc, hash_str(l)))
}

/// Per-step seed used by stochastic policies. Depends only on the scenario seed
/// and the absolute step index, so a rewound scenario replays the same stream.
pub fn step_seed(scenario_seed: u64, step_index: usize) -> u64 {
    mix(scenario_seed, step_index as u64)
}

/// Per-vehicle seed within a step.
pub fn vehicle_seed(step_seed: u64, slot: usize) -> u64 {
    mix(step_seed, 0x5eed_0000 + slot as u64)
}
