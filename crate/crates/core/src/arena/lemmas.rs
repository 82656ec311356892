//! Brute-force checks of the two set-system lemmas behind the lower bound.
//!
//! Subsets of a small universe `[u]` are bitmasks; element `x` is bit `x`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SEPARATION_M_MAX: usize = 8;
pub const GENERATION_U_MAX: usize = 12;
pub const GENERATION_N_MAX: usize = 3;
/// Universes up to this size get a direct pass over every collection in
/// addition to the signature enumeration.
pub const DIRECT_EXHAUSTIVE_U_MAX: usize = 6;
pub const DIRECT_SAMPLES: usize = 4096;

/// Every ordered pair `x != y` in `[m]` has some set containing `x` but not
/// `y`. Written straight from the definition.
pub fn separates(m: usize, sets: &[u32]) -> bool {
    (0..m).all(|x| {
        (0..m)
            .filter(|&y| y != x)
            .all(|y| sets.iter().any(|&s| s >> x & 1 == 1 && s >> y & 1 == 0))
    })
}

/// Ordered pairs `(x, y)`, `x != y`, that `set` separates, as bit `x * m + y`.
fn separated_pairs(m: usize, set: u32) -> u64 {
    let mut out = 0u64;
    for x in (0..m).filter(|&x| set >> x & 1 == 1) {
        for y in (0..m).filter(|&y| set >> y & 1 == 0) {
            out |= 1 << (x * m + y);
        }
    }
    out
}

fn all_pairs(m: usize) -> u64 {
    (0..m)
        .flat_map(|x| (0..m).filter(move |&y| y != x).map(move |y| 1u64 << (x * m + y)))
        .fold(0, |a, b| a | b)
}

/// Searches every collection of `n` distinct proper nonempty subsets of
/// `[m]` (repeats, the empty set and `[m]` itself separate nothing new).
fn find_separating(m: usize, n: usize) -> Option<Vec<u32>> {
    let target = all_pairs(m);
    if n == 0 {
        return (target == 0).then(Vec::new);
    }
    let masks: Vec<u32> = (1..(1u32 << m) - 1).collect();
    let cover: Vec<u64> = masks.iter().map(|&s| separated_pairs(m, s)).collect();
    let mut chosen = Vec::with_capacity(n);
    fn go(start: usize, left: usize, have: u64, target: u64, cover: &[u64], masks: &[u32], chosen: &mut Vec<u32>) -> bool {
        if left == 0 {
            return have == target;
        }
        for j in start..=cover.len().saturating_sub(left) {
            chosen.push(masks[j]);
            if go(j + 1, left - 1, have | cover[j], target, cover, masks, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    go(0, n, 0, target, &cover, &masks, &mut chosen).then_some(chosen)
}

fn binomial(n: usize, r: usize) -> usize {
    (0..r).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Smallest `n` with an antichain of size `m` in the subsets of `[n]`.
pub fn sperner_minimum(m: usize) -> usize {
    (0..).find(|&n| binomial(n, n / 2) >= m).expect("unbounded")
}

/// Collection read off an antichain: element `x` gets the `x`-th
/// `floor(n/2)`-subset of `[n]` as its membership signature.
pub fn antichain_witness(m: usize, n: usize) -> Vec<u32> {
    let sigs: Vec<u32> = (0u32..1 << n).filter(|s| s.count_ones() as usize == n / 2).take(m).collect();
    (0..n)
        .map(|i| sigs.iter().enumerate().filter(|(_, &s)| s >> i & 1 == 1).fold(0, |acc, (x, _)| acc | 1 << x))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationCase {
    pub m: usize,
    /// `log2(m) + 1`.
    pub lower_bound: f64,
    /// Sizes for which the exhaustive search found no separating collection.
    pub refuted_sizes: Vec<usize>,
    pub lower_bound_holds: bool,
    pub minimum_size: usize,
    pub witness: Vec<u32>,
    pub witness_verified: bool,
    /// Minimum predicted by Sperner's theorem.
    pub antichain_minimum: usize,
    /// `ceil(log2 m) + 1`, and whether a collection that small exists.
    pub ceil_log_size: usize,
    pub ceil_log_size_achievable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub m_max: usize,
    pub cases: Vec<SeparationCase>,
    pub passed: bool,
}

/// For each `2 <= m <= m_max`: refutes every size below the true minimum by
/// exhaustive search, so in particular every size below `log2(m) + 1`, and
/// exhibits a minimum-size witness checked by `separates`. (For `m = 1` the
/// empty collection separates vacuously, so the bound starts at 2.)
pub fn verify_separation_lemma(m_max: usize) -> Result<SeparationReport> {
    if !(2..=SEPARATION_M_MAX).contains(&m_max) {
        return Err(Error::Budget(format!("m_max must be in 2..={SEPARATION_M_MAX}, got {m_max}")));
    }
    let mut cases = Vec::new();
    for m in 2..=m_max {
        let lower_bound = (m as f64).log2() + 1.0;
        let mut refuted_sizes = Vec::new();
        let (minimum_size, witness) = (0..)
            .find_map(|n| match find_separating(m, n) {
                Some(w) => Some((n, w)),
                None => {
                    refuted_sizes.push(n);
                    None
                }
            })
            .expect("m sets always suffice");
        let ceil_log_size = (m as f64).log2().ceil() as usize + 1;
        cases.push(SeparationCase {
            m,
            lower_bound,
            lower_bound_holds: (minimum_size as f64) >= lower_bound && refuted_sizes.len() == minimum_size,
            refuted_sizes,
            minimum_size,
            witness_verified: separates(m, &witness),
            witness,
            antichain_minimum: sperner_minimum(m),
            ceil_log_size,
            ceil_log_size_achievable: ceil_log_size >= minimum_size,
        });
    }
    let passed = cases.iter().all(|c| c.lower_bound_holds && c.witness_verified);
    Ok(SeparationReport { m_max, cases, passed })
}

/// `T` is generated by `sets` over `[u]`: for all `x in T`, `y notin T`,
/// some set contains `x` and not `y`. Written straight from the definition.
pub fn generates(u: usize, sets: &[u32], t: u32) -> bool {
    (0..u).filter(|&x| t >> x & 1 == 1).all(|x| {
        (0..u)
            .filter(|&y| t >> y & 1 == 0)
            .all(|y| sets.iter().any(|&s| s >> x & 1 == 1 && s >> y & 1 == 0))
    })
}

/// Number of `T` generated by `sets`. `T` is generated exactly when, for each
/// `x in T`, the intersection of the sets containing `x` lies inside `T`.
pub fn generated_count(u: usize, sets: &[u32]) -> u64 {
    let full = universe(u);
    let closure: Vec<u32> = (0..u)
        .map(|x| sets.iter().filter(|&&s| s >> x & 1 == 1).fold(full, |acc, &s| acc & s))
        .collect();
    (0..=full)
        .filter(|&t| (0..u).filter(|&x| t >> x & 1 == 1).all(|x| closure[x] & !t == 0))
        .count() as u64
}

fn universe(u: usize) -> u32 {
    ((1u64 << u) - 1) as u32
}

/// The family together with all complements, without repeats.
pub fn complement_closure(u: usize, sets: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = sets.iter().flat_map(|&s| [s, !s & universe(u)]).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Number of distinct membership signatures of the elements of `[u]`.
pub fn signature_classes(u: usize, sets: &[u32]) -> usize {
    let mut sigs: Vec<u64> = (0..u)
        .map(|x| sets.iter().enumerate().fold(0u64, |acc, (i, &s)| acc | ((s >> x & 1) as u64) << i))
        .collect();
    sigs.sort_unstable();
    sigs.dedup();
    sigs.len()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationCase {
    pub n: usize,
    /// `2^(2^n)`.
    pub bound: u64,
    /// Occupied-signature patterns enumerated; each stands for every
    /// collection of `n` sets whose elements realize exactly those patterns.
    pub patterns_checked: u64,
    pub max_count: u64,
    /// Collections checked directly, exhaustively or by sampling.
    pub direct_checked: u64,
    pub direct_exhaustive: bool,
    pub direct_max_count: u64,
    /// Largest count after closing under complement, with the size of the
    /// closed family at which it occurred.
    pub closed_max_count: u64,
    pub closed_bound_holds: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub universe: usize,
    pub n_max: usize,
    pub cases: Vec<GenerationCase>,
    pub passed: bool,
}

/// Checks the closed-family chain on one collection: `r <= 2^(n'-1)`
/// signature classes and at most `2^r` generated sets, for the closed family
/// of size `n' >= 1`.
fn closed_check(u: usize, sets: &[u32]) -> (u64, bool) {
    let closed = complement_closure(u, sets);
    if closed.is_empty() {
        return (generated_count(u, &closed), true);
    }
    let r = signature_classes(u, &closed);
    let count = generated_count(u, &closed);
    let ok = r as u64 <= 1 << (closed.len() - 1) && count <= 1u64 << r;
    (count, ok)
}

/// Every collection of `n <= n_max` subsets of `[u]` generates at most
/// `2^(2^n)` sets.
///
/// All collections are covered by enumerating the set `P` of membership
/// signatures that occur: the generated sets are the unions of signature
/// classes closed upward within `P`, so the count depends only on `P`. One
/// realization per `P` is counted with the direct predicate. As a check on
/// that reduction, collections are also counted directly: all of them for
/// `u <= DIRECT_EXHAUSTIVE_U_MAX`, `DIRECT_SAMPLES` random ones above.
pub fn verify_generation_bound<R: Rng + ?Sized>(u: usize, n_max: usize, rng: &mut R) -> Result<GenerationReport> {
    if !(1..=GENERATION_U_MAX).contains(&u) || n_max > GENERATION_N_MAX {
        return Err(Error::Budget(format!(
            "need 1 <= u <= {GENERATION_U_MAX} and n_max <= {GENERATION_N_MAX}, got u = {u}, n_max = {n_max}"
        )));
    }
    let mut cases = Vec::new();
    for n in 0..=n_max {
        let bound = 1u64 << (1 << n);
        let (mut patterns, mut max_count, mut closed_max, mut closed_ok) = (0u64, 0u64, 0u64, true);
        for p in 1u32..1 << (1 << n) {
            let sigs: Vec<u32> = (0..1u32 << n).filter(|s| p >> s & 1 == 1).collect();
            if sigs.len() > u {
                continue;
            }
            let sig_of = |x: usize| sigs[x.min(sigs.len() - 1)];
            let sets: Vec<u32> = (0..n)
                .map(|i| (0..u).filter(|&x| sig_of(x) >> i & 1 == 1).fold(0, |acc, x| acc | 1 << x))
                .collect();
            patterns += 1;
            max_count = max_count.max(generated_count(u, &sets));
            let (c, ok) = closed_check(u, &sets);
            closed_max = closed_max.max(c);
            closed_ok &= ok;
        }

        let exhaustive = u <= DIRECT_EXHAUSTIVE_U_MAX;
        let subsets = 1u64 << u;
        let total = subsets.pow(n as u32);
        let draws = if exhaustive { total } else { DIRECT_SAMPLES as u64 };
        let mut direct_max = 0u64;
        for c in 0..draws {
            let sets: Vec<u32> = if exhaustive {
                (0..n).map(|i| (c / subsets.pow(i as u32) % subsets) as u32).collect()
            } else {
                (0..n).map(|_| rng.random_range(0..subsets) as u32).collect()
            };
            direct_max = direct_max.max(generated_count(u, &sets));
            let (c, ok) = closed_check(u, &sets);
            closed_max = closed_max.max(c);
            closed_ok &= ok;
        }
        cases.push(GenerationCase {
            n,
            bound,
            patterns_checked: patterns,
            max_count,
            direct_checked: draws,
            direct_exhaustive: exhaustive,
            direct_max_count: direct_max,
            closed_max_count: closed_max,
            closed_bound_holds: closed_ok,
            passed: max_count <= bound && direct_max <= max_count && closed_ok,
        });
    }
    let passed = cases.iter().all(|c| c.passed);
    Ok(GenerationReport {
        universe: u,
        n_max,
        cases,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn two_points_need_two_sets() {
        assert!(!separates(2, &[0b01]));
        assert!(!separates(2, &[0b10]));
        assert!(separates(2, &[0b01, 0b10]));
        assert!(find_separating(2, 1).is_none());
    }

    #[test]
    fn four_points_refute_two_sets_by_brute_force() {
        // All (2^4)^2 ordered pairs of subsets, no pruning.
        for a in 0u32..16 {
            for b in 0u32..16 {
                assert!(!separates(4, &[a, b]));
            }
        }
    }

    #[test]
    fn eight_points_need_five_sets() {
        assert!(find_separating(8, 4).is_none());
        let w = antichain_witness(8, 5);
        assert!(separates(8, &w));
        assert_eq!(sperner_minimum(8), 5);
    }

    #[test]
    fn separation_report() {
        let r = verify_separation_lemma(8).unwrap();
        assert!(r.passed);
        let minima: Vec<_> = r.cases.iter().map(|c| c.minimum_size).collect();
        assert_eq!(minima, [2, 3, 4, 4, 4, 5, 5]);
        for c in &r.cases {
            assert_eq!(c.minimum_size, c.antichain_minimum);
            assert!(separates(c.m, &c.witness));
            assert_eq!(c.witness.len(), c.minimum_size);
        }
        let short: Vec<_> = r.cases.iter().filter(|c| !c.ceil_log_size_achievable).map(|c| c.m).collect();
        assert_eq!(short, [4, 7, 8]);
        assert!(verify_separation_lemma(9).is_err());
        assert!(verify_separation_lemma(1).is_err());
        assert_eq!(verify_separation_lemma(6).unwrap(), verify_separation_lemma(6).unwrap());
    }

    #[test]
    fn generated_count_matches_definition() {
        let mut rng = stream(1, 0);
        for _ in 0..300 {
            let u = rng.random_range(1..=6);
            let n = rng.random_range(0..=3);
            let sets: Vec<u32> = (0..n).map(|_| rng.random_range(0..1u32 << u)).collect();
            let naive = (0..1u32 << u).filter(|&t| generates(u, &sets, t)).count() as u64;
            assert_eq!(generated_count(u, &sets), naive);
        }
    }

    #[test]
    fn small_generation_examples() {
        // No sets: only the empty set and the whole universe.
        assert_eq!(generated_count(3, &[]), 2);
        let a = 0b011;
        assert_eq!(generated_count(3, &[a]), 3);
        assert!(generated_count(3, &[a]) <= 4);
        assert_eq!(complement_closure(3, &[a]), vec![0b011, 0b100]);
    }

    #[test]
    fn generation_report() {
        for u in 1..=8 {
            let r = verify_generation_bound(u, 3, &mut stream(2, u as u64)).unwrap();
            assert!(r.passed, "{r:?}");
            assert_eq!(r.cases[0].max_count, 2);
        }
        let r = verify_generation_bound(3, 1, &mut stream(3, 0)).unwrap();
        assert_eq!(r.cases[1].max_count, 3);
        assert!(verify_generation_bound(13, 1, &mut stream(0, 0)).is_err());
        assert!(verify_generation_bound(4, 4, &mut stream(0, 0)).is_err());
    }
}
