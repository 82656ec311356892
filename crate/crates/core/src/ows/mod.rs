//! The one-way-sequence concept class.
//!
//! A concept is indexed by a k-bit master seed `s`. The seed roots a GGM
//! tree of depth k; index `i` names a leaf. The example string `sigma_i`
//! carries the right-sibling seeds on the path to leaf `i`, which is enough
//! to recompute every later leaf but withholds the leaf itself, and the
//! label bit `f(i, s)` is derived from that withheld leaf seed.
//!
//! Indices are 0-based and read most-significant bit first: depth 1 of the
//! tree branches on the top bit of `i`.

mod prg;
mod tree;
pub mod vectors;

pub use prg::{prg_expand, PRG_DOMAIN_TAG};
pub use tree::{compute_forward, concept_eval, derive_example, leaf_seed, CoPath, Derived};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Largest supported domain bit-length; keeps `k <= 63` so indices and seeds
/// fit a machine word.
pub const MAX_DOMAIN_BITS: usize = 65 * 65 - 1;

/// Domain bit-length `d` and the derived index/seed length `k = floor(sqrt(d)) - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub struct Params {
    d: usize,
    k: u32,
}

#[derive(Serialize, Deserialize)]
struct ParamsRepr {
    d: usize,
    k: u32,
}

impl TryFrom<ParamsRepr> for Params {
    type Error = Error;
    fn try_from(r: ParamsRepr) -> Result<Self> {
        let p = Params::new(r.d)?;
        if p.k != r.k {
            return Err(Error::Encoding(format!("k = {} does not match d = {}", r.k, r.d)));
        }
        Ok(p)
    }
}

impl From<Params> for ParamsRepr {
    fn from(p: Params) -> Self {
        ParamsRepr { d: p.d, k: p.k }
    }
}

impl Params {
    pub fn new(d: usize) -> Result<Self> {
        if !(9..=MAX_DOMAIN_BITS).contains(&d) {
            return Err(Error::DomainBits(d));
        }
        let k = (d.isqrt() - 1) as u32;
        debug_assert!(k >= 2 && (k * k + k) as usize <= d - k as usize);
        Ok(Self { d, k })
    }

    /// The smallest domain length for a given `k`.
    pub fn for_k(k: u32) -> Result<Self> {
        Self::new(((k + 1) * (k + 1)) as usize)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Length of an example string, `d - k`.
    pub fn sigma_bits(&self) -> usize {
        self.d - self.k as usize
    }

    /// Number of indices, `2^k`.
    pub fn index_count(&self) -> u64 {
        1u64 << self.k
    }

    pub fn top_index(&self) -> u64 {
        self.index_count() - 1
    }

    pub fn seed_mask(&self) -> u64 {
        self.top_index()
    }

    pub fn check_index(&self, i: u64) -> Result<()> {
        if i >= self.index_count() {
            return Err(Error::IndexOutOfRange { index: i, k: self.k });
        }
        Ok(())
    }

    pub fn check_sigma(&self, sigma: &BitString) -> Result<()> {
        if sigma.len() != self.sigma_bits() {
            return Err(Error::BitLength {
                expected: self.sigma_bits(),
                actual: sigma.len(),
            });
        }
        Ok(())
    }

    /// Bit `depth` (1-based, MSB first) of index `i`.
    pub(crate) fn index_bit(&self, i: u64, depth: u32) -> bool {
        i >> (self.k - depth) & 1 == 1
    }

    /// Number of zero bits among the k bits of `i`.
    pub fn zero_bits(&self, i: u64) -> u32 {
        self.k - i.count_ones()
    }
}

/// The k-bit master secret naming one concept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedKey(u64);

impl SeedKey {
    pub fn new(params: &Params, value: u64) -> Result<Self> {
        if value > params.seed_mask() {
            return Err(Error::BitLength {
                expected: params.k() as usize,
                actual: 64 - value.leading_zeros() as usize,
            });
        }
        Ok(Self(value))
    }

    pub fn random<R: Rng + ?Sized>(params: &Params, rng: &mut R) -> Self {
        Self(rng.random::<u64>() & params.seed_mask())
    }

    pub fn value(&self) -> u64 {
        self.0
    }

    pub fn to_bits(&self, params: &Params) -> BitString {
        BitString::from_u64(self.0, params.k() as usize)
    }

    pub fn to_hex(&self, params: &Params) -> String {
        self.to_bits(params).to_hex()
    }

    pub fn from_hex(params: &Params, text: &str) -> Result<Self> {
        let bits = BitString::from_hex(params.k() as usize, text)?;
        Ok(Self(bits.read_u64(0, params.k() as usize)))
    }
}

/// A point `(i, sigma)` of the domain `{0,1}^k x {0,1}^(d-k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Example {
    pub i: u64,
    pub sigma: BitString,
}

impl Example {
    pub fn new(params: &Params, i: u64, sigma: BitString) -> Result<Self> {
        params.check_index(i)?;
        params.check_sigma(&sigma)?;
        Ok(Self { i, sigma })
    }

    /// A uniformly random point; off the sequence with overwhelming probability.
    pub fn random<R: Rng + ?Sized>(params: &Params, rng: &mut R) -> Self {
        let mut sigma = BitString::zeros(params.sigma_bits());
        for t in 0..sigma.len() {
            sigma.set(t, rng.random());
        }
        Self {
            i: rng.random::<u64>() & params.top_index(),
            sigma,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledExample {
    pub example: Example,
    pub label: bool,
}

impl LabeledExample {
    pub fn new(example: Example, label: bool) -> Self {
        Self { example, label }
    }

    /// The on-sequence example at index `i`, labeled by the concept.
    pub fn on_sequence(params: &Params, s: &SeedKey, i: u64) -> Result<Self> {
        let Derived { sigma, fbit } = derive_example(params, s, i)?;
        Ok(Self {
            example: Example { i, sigma },
            label: fbit,
        })
    }

    pub fn validate(&self, params: &Params) -> Result<()> {
        params.check_index(self.example.i)?;
        params.check_sigma(&self.example.sigma)
    }
}

/// JSON-lines record for a labeled example: `{"i": 5, "sigma": "<hex>", "label": 1}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExampleRecord {
    pub i: u64,
    pub sigma: String,
    pub label: u8,
}

impl ExampleRecord {
    pub fn from_labeled(x: &LabeledExample) -> Self {
        Self {
            i: x.example.i,
            sigma: x.example.sigma.to_hex(),
            label: x.label as u8,
        }
    }

    pub fn into_labeled(self, params: &Params) -> Result<LabeledExample> {
        if self.label > 1 {
            return Err(Error::Encoding(format!("label must be 0 or 1, got {}", self.label)));
        }
        let sigma = BitString::from_hex(params.sigma_bits(), &self.sigma)?;
        Ok(LabeledExample::new(Example::new(params, self.i, sigma)?, self.label == 1))
    }
}
