//! Suite orchestration behind the `hypro` binary: configuration loading,
//! deterministic JSON-lines reporting, the per-space and per-product check
//! batteries, and CSV plot-data export.

pub mod config;
pub mod export;
pub mod report;
pub mod suite;

/// Deterministic seed derivation: one base seed per run, one stream per
/// check id.
pub fn derive_seed(base: u64, tag: &str) -> u64 {
    // FNV-1a over the tag, folded into the base seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    base ^ h
}

/// Short hex digest of any serializable input bundle.
pub fn digest<T: serde::Serialize>(value: &T) -> String {
    use sha2::{Digest, Sha256};
    let bytes = serde_json::to_vec(value).unwrap_or_default();
    let hash = Sha256::digest(&bytes);
    hex::encode(&hash[..8])
}
