//! Content hashes that stay fixed across runs and platforms.

use sha2::{Digest, Sha256};

/// SHA-256 over length-prefixed parts, so `("ab","c")` and `("a","bc")` differ.
pub fn digest_parts(parts: &[&[u8]]) -> [u8; 32] {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().into()
}

pub fn stable_u64(parts: &[&[u8]]) -> u64 {
    let d = digest_parts(parts);
    u64::from_le_bytes(d[..8].try_into().unwrap())
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex(&Sha256::digest(data))
}
