//! Fixed-length bit strings, packed MSB-first.
//!
//! Bit 0 of a string is the most significant bit of its first byte. Trailing
//! bits of the last byte are always zero, so equal strings have equal bytes.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: usize,
    bytes: Vec<u8>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            bytes: vec![0; len.div_ceil(8)],
        }
    }

    /// Builds a string from packed bytes, rejecting a byte count that does not
    /// match `len` or nonzero bits past the end.
    pub fn from_bytes(len: usize, bytes: Vec<u8>) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::BitLength {
                expected: len,
                actual: bytes.len() * 8,
            });
        }
        let s = Self { len, bytes };
        if s.tail_mask() & s.bytes.last().copied().unwrap_or(0) != 0 {
            return Err(Error::Encoding("nonzero bits past the end of the string".into()));
        }
        Ok(s)
    }

    pub fn from_hex(len: usize, text: &str) -> Result<Self> {
        let bytes = hex::decode(text).map_err(|e| Error::Hex(e.to_string()))?;
        Self::from_bytes(len, bytes)
    }

    /// The low `width` bits of `value`, most significant first.
    pub fn from_u64(value: u64, width: usize) -> Self {
        let mut s = Self::zeros(width);
        s.write_u64(0, width, value);
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.len, "bit {pos} out of range for length {}", self.len);
        self.bytes[pos / 8] >> (7 - pos % 8) & 1 == 1
    }

    pub fn set(&mut self, pos: usize, bit: bool) {
        assert!(pos < self.len, "bit {pos} out of range for length {}", self.len);
        let mask = 1u8 << (7 - pos % 8);
        if bit {
            self.bytes[pos / 8] |= mask;
        } else {
            self.bytes[pos / 8] &= !mask;
        }
    }

    /// Reads `width <= 64` bits starting at `offset` as a big-endian integer.
    pub fn read_u64(&self, offset: usize, width: usize) -> u64 {
        debug_assert!(width <= 64 && offset + width <= self.len);
        (offset..offset + width).fold(0u64, |acc, p| (acc << 1) | self.get(p) as u64)
    }

    /// Writes the low `width` bits of `value` starting at `offset`.
    pub fn write_u64(&mut self, offset: usize, width: usize, value: u64) {
        debug_assert!(width <= 64 && offset + width <= self.len);
        for t in 0..width {
            self.set(offset + t, value >> (width - 1 - t) & 1 == 1);
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.bytes.iter().map(|b| b.count_ones()).sum()
    }

    /// Concatenation, used by the serializers.
    pub fn concat(parts: &[&BitString]) -> BitString {
        let len = parts.iter().map(|p| p.len).sum();
        let mut out = BitString::zeros(len);
        let mut at = 0;
        for p in parts {
            for t in 0..p.len {
                if p.get(t) {
                    out.set(at + t, true);
                }
            }
            at += p.len;
        }
        out
    }

    pub fn slice(&self, offset: usize, len: usize) -> BitString {
        let mut out = BitString::zeros(len);
        for t in 0..len {
            if self.get(offset + t) {
                out.set(t, true);
            }
        }
        out
    }

    fn tail_mask(&self) -> u8 {
        match self.len % 8 {
            0 => 0,
            r => 0xff >> r,
        }
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({}b:{})", self.len, self.to_hex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn msb_first_packing() {
        let s = BitString::from_u64(0b101, 3);
        assert_eq!(s.as_bytes(), &[0b1010_0000]);
        assert_eq!(s.to_hex(), "a0");
        assert!(s.get(0) && !s.get(1) && s.get(2));
    }

    #[test]
    fn rejects_dirty_tail() {
        assert!(BitString::from_hex(3, "a1").is_err());
        assert!(BitString::from_hex(3, "a0").is_ok());
        assert!(BitString::from_hex(9, "a0").is_err());
    }

    proptest! {
        #[test]
        fn u64_fields_round_trip(v in any::<u64>(), width in 1usize..=64, offset in 0usize..20) {
            let v = if width == 64 { v } else { v & ((1u64 << width) - 1) };
            let mut s = BitString::zeros(offset + width + 3);
            s.write_u64(offset, width, v);
            prop_assert_eq!(s.read_u64(offset, width), v);
            prop_assert_eq!(BitString::from_hex(s.len(), &s.to_hex()).unwrap(), s);
        }
    }
}
