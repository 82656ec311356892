//! Line-oriented test-vector files.
//!
//! `ows_vectors.txt`: `k s_hex i sigma_hex fbit`, with `d = (k+1)^2`.
//! `prg_vectors.txt`: `k seed_hex left_hex right_hex`.
//! Blank lines and lines starting with `#` are ignored.

use super::{derive_example, prg_expand, Params, SeedKey};
use crate::bits::BitString;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwsVector {
    pub k: u32,
    pub s: SeedKey,
    pub i: u64,
    pub sigma: BitString,
    pub fbit: bool,
}

impl OwsVector {
    pub fn params(&self) -> Params {
        Params::for_k(self.k).expect("k validated on construction")
    }

    pub fn compute(params: &Params, s: SeedKey, i: u64) -> Result<Self> {
        let x = derive_example(params, &s, i)?;
        Ok(Self {
            k: params.k(),
            s,
            i,
            sigma: x.sigma,
            fbit: x.fbit,
        })
    }

    pub fn to_line(&self) -> String {
        let p = self.params();
        format!(
            "{} {} {} {} {}",
            self.k,
            self.s.to_hex(&p),
            self.i,
            self.sigma.to_hex(),
            self.fbit as u8
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrgVector {
    pub k: u32,
    pub seed: u64,
    pub left: u64,
    pub right: u64,
}

impl PrgVector {
    pub fn compute(k: u32, seed: u64) -> Result<Self> {
        let (left, right) = prg_expand(k, seed)?;
        Ok(Self { k, seed, left, right })
    }

    pub fn to_line(&self) -> String {
        let w = self.k as usize;
        format!(
            "{} {} {} {}",
            self.k,
            BitString::from_u64(self.seed, w).to_hex(),
            BitString::from_u64(self.left, w).to_hex(),
            BitString::from_u64(self.right, w).to_hex()
        )
    }
}

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(n, l)| (n, l.split_whitespace().collect()))
}

fn bad(line: usize, what: impl std::fmt::Display) -> Error {
    Error::Encoding(format!("line {line}: {what}"))
}

fn parse_k(line: usize, field: &str) -> Result<u32> {
    field.parse().map_err(|e| bad(line, format!("k: {e}")))
}

fn parse_word(line: usize, k: u32, field: &str) -> Result<u64> {
    let bits = BitString::from_hex(k as usize, field).map_err(|e| bad(line, e))?;
    Ok(bits.read_u64(0, k as usize))
}

pub fn parse_ows_vectors(text: &str) -> Result<Vec<OwsVector>> {
    lines(text)
        .map(|(n, f)| {
            if f.len() != 5 {
                return Err(bad(n, "expected 5 fields"));
            }
            let k = parse_k(n, f[0])?;
            let p = Params::for_k(k).map_err(|e| bad(n, e))?;
            let s = SeedKey::from_hex(&p, f[1]).map_err(|e| bad(n, e))?;
            let i: u64 = f[2].parse().map_err(|e| bad(n, format!("i: {e}")))?;
            p.check_index(i).map_err(|e| bad(n, e))?;
            let sigma = BitString::from_hex(p.sigma_bits(), f[3]).map_err(|e| bad(n, e))?;
            let fbit = match f[4] {
                "0" => false,
                "1" => true,
                other => return Err(bad(n, format!("fbit must be 0 or 1, got {other}"))),
            };
            Ok(OwsVector { k, s, i, sigma, fbit })
        })
        .collect()
}

pub fn parse_prg_vectors(text: &str) -> Result<Vec<PrgVector>> {
    lines(text)
        .map(|(n, f)| {
            if f.len() != 4 {
                return Err(bad(n, "expected 4 fields"));
            }
            let k = parse_k(n, f[0])?;
            if !(1..=63).contains(&k) {
                return Err(bad(n, "k outside [1, 63]"));
            }
            Ok(PrgVector {
                k,
                seed: parse_word(n, k, f[1])?,
                left: parse_word(n, k, f[2])?,
                right: parse_word(n, k, f[3])?,
            })
        })
        .collect()
}
