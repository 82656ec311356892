//! Length-doubling generator underlying the GGM tree.
//!
//! `expand(seed)` hashes `PRG_DOMAIN_TAG || k || seed` with SHA-256, where the
//! seed is packed as k bits MSB-first into `ceil(k/8)` bytes and `k` is one
//! byte. The first 2k digest bits, read MSB-first, are split into the left
//! and right children. Frozen vectors live in `testdata/prg_vectors.txt`.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const PRG_DOMAIN_TAG: &[u8] = b"owslab/ggm-prg/v1";

/// Expands a k-bit seed into two k-bit children.
pub fn prg_expand(k: u32, seed: u64) -> Result<(u64, u64)> {
    if !(1..=63).contains(&k) {
        return Err(Error::Parameter {
            name: "k",
            range: "[1, 63]",
            value: k as f64,
        });
    }
    if seed >> k != 0 {
        return Err(Error::BitLength {
            expected: k as usize,
            actual: 64 - seed.leading_zeros() as usize,
        });
    }
    Ok(expand(k, seed))
}

/// Unchecked expansion; callers guarantee `seed < 2^k` and `k <= 63`.
pub(crate) fn expand(k: u32, seed: u64) -> (u64, u64) {
    let packed = (seed << (64 - k)).to_be_bytes();
    let mut h = Sha256::new();
    h.update(PRG_DOMAIN_TAG);
    h.update([k as u8]);
    h.update(&packed[..(k as usize).div_ceil(8)]);
    let digest = h.finalize();
    let mut head = [0u8; 16];
    head.copy_from_slice(&digest[..16]);
    let head = u128::from_be_bytes(head);
    let mask = (1u64 << k) - 1;
    let left = (head >> (128 - k)) as u64 & mask;
    let right = (head >> (128 - 2 * k)) as u64 & mask;
    (left, right)
}
