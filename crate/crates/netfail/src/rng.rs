//! Seed derivation for deterministic substreams. Every randomized routine
//! takes a master seed and derives one independent substream per trial (or
//! per pair, per row), so results do not depend on iteration order, trial
//! count, or thread count.

pub fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Seed for substream `index` of stream `master`.
pub fn substream_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(0x6a09e667f3bcc909)))
}

/// Counter-based uniform draw in [0, 1) for item `index` of stream `master`.
pub fn indexed_uniform(master: u64, index: u64) -> f64 {
    let bits = substream_seed(master, index);
    (bits >> 11) as f64 / (1u64 << 53) as f64
}
