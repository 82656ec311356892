use super::prg::expand;
use super::{Example, Params, SeedKey};
use crate::bits::BitString;
use crate::error::{Error, Result};

/// An example string together with its label bit: `<G(i, s), f(i, s)>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Derived {
    pub sigma: BitString,
    pub fbit: bool,
}

/// Right-sibling seeds along the root-to-leaf path of an index, one entry for
/// every depth at which the index turns left.
///
/// Wire format: `k` slots of `k` bits, slot `t` (1-based depth) holding the
/// sibling seed when bit `t` of the index is 0 and zeros otherwise, followed
/// by zero padding up to `d - k` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoPath {
    pub entries: Vec<(u32, u64)>,
}

impl CoPath {
    /// Reads the slots selected by the zero bits of `i`. Total on any string of
    /// the right length: whatever bits sit in those slots are taken as seeds.
    pub fn parse(params: &Params, i: u64, sigma: &BitString) -> Result<Self> {
        params.check_index(i)?;
        params.check_sigma(sigma)?;
        let entries = (1..=params.k())
            .filter(|&t| !params.index_bit(i, t))
            .map(|t| (t, read_slot(params, sigma, t)))
            .collect();
        Ok(Self { entries })
    }

    pub fn serialize(&self, params: &Params) -> BitString {
        let mut sigma = BitString::zeros(params.sigma_bits());
        for &(t, seed) in &self.entries {
            write_slot(params, &mut sigma, t, seed);
        }
        sigma
    }
}

fn slot_offset(params: &Params, depth: u32) -> usize {
    (depth as usize - 1) * params.k() as usize
}

fn read_slot(params: &Params, sigma: &BitString, depth: u32) -> u64 {
    sigma.read_u64(slot_offset(params, depth), params.k() as usize)
}

fn write_slot(params: &Params, sigma: &mut BitString, depth: u32, seed: u64) {
    sigma.write_u64(slot_offset(params, depth), params.k() as usize, seed);
}

fn label_of_leaf(k: u32, leaf: u64) -> bool {
    let (left, _) = expand(k, leaf);
    left >> (k - 1) & 1 == 1
}

/// Seed of leaf `i`: k descents from the root, left on 0 and right on 1.
pub fn leaf_seed(params: &Params, s: &SeedKey, i: u64) -> Result<u64> {
    params.check_index(i)?;
    let k = params.k();
    Ok((1..=k).fold(s.value(), |node, t| {
        let (l, r) = expand(k, node);
        if params.index_bit(i, t) {
            r
        } else {
            l
        }
    }))
}

/// `<G(i, s), f(i, s)>`: the co-path encoding of leaf `i` and the label bit,
/// which is the first bit of the left child of the leaf seed.
pub fn derive_example(params: &Params, s: &SeedKey, i: u64) -> Result<Derived> {
    params.check_index(i)?;
    let k = params.k();
    let mut sigma = BitString::zeros(params.sigma_bits());
    let mut node = s.value();
    for t in 1..=k {
        let (l, r) = expand(k, node);
        if params.index_bit(i, t) {
            node = r;
        } else {
            write_slot(params, &mut sigma, t, r);
            node = l;
        }
    }
    Ok(Derived {
        sigma,
        fbit: label_of_leaf(k, node),
    })
}

/// Computes `<G(j, s), f(j, s)>` from `G(i, s)` for any `j > i`.
///
/// Leaf `j` sits in the right subtree hanging off the highest depth where
/// `i` turns left and `j` turns right; that subtree's root seed is stored in
/// `sigma_i`. Entries above the divergence are shared with `i`, entries
/// below it come from descending the subtree.
pub fn compute_forward(params: &Params, j: u64, i: u64, sigma_i: &BitString) -> Result<Derived> {
    params.check_index(i)?;
    params.check_index(j)?;
    params.check_sigma(sigma_i)?;
    if j <= i {
        return Err(Error::NotForward { j, i });
    }
    let k = params.k();
    // Highest differing bit; j > i so i has 0 and j has 1 there.
    let split = k - (63 - (i ^ j).leading_zeros());
    let mut sigma = BitString::zeros(params.sigma_bits());
    for t in 1..split {
        if !params.index_bit(j, t) {
            write_slot(params, &mut sigma, t, read_slot(params, sigma_i, t));
        }
    }
    let mut node = read_slot(params, sigma_i, split);
    for t in split + 1..=k {
        let (l, r) = expand(k, node);
        if params.index_bit(j, t) {
            node = r;
        } else {
            write_slot(params, &mut sigma, t, r);
            node = l;
        }
    }
    Ok(Derived {
        sigma,
        fbit: label_of_leaf(k, node),
    })
}

/// `c_s(i, sigma)`: 1 exactly when `sigma = G(i, s)` and `f(i, s) = 1`.
pub fn concept_eval(params: &Params, s: &SeedKey, x: &Example) -> bool {
    match derive_example(params, s, x.i) {
        Ok(Derived { sigma, fbit }) => fbit && sigma == x.sigma,
        Err(_) => false,
    }
}
