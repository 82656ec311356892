//! Private selection: robust minimum via interior point, and most-frequent
//! item in pure (exponential mechanism) and approximate (stable histogram)
//! flavors.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::dp::{exp_mech_interior_point, sample_log_weights, PrivacyBudget, SortedIntDataset, TwoSidedGeometric};
use crate::error::{Error, Result};

/// Gap multiplier for the pure most-frequent-item guarantee:
/// the mode is returned w.p. `>= 1 - beta` once it leads by
/// `PURE_GAP_CONSTANT * ln(R / beta) / epsilon`.
pub const PURE_GAP_CONSTANT: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustMinParams {
    pub alpha_prime: f64,
    pub beta: f64,
    pub budget: PrivacyBudget,
    /// Values lie in `[1, bound]`.
    pub bound: u64,
}

impl RobustMinParams {
    pub fn new(alpha_prime: f64, beta: f64, budget: PrivacyBudget, bound: u64) -> Result<Self> {
        if !(alpha_prime > 0.0 && alpha_prime <= 0.5) {
            return Err(Error::Parameter {
                name: "alpha_prime",
                range: "(0, 1/2]",
                value: alpha_prime,
            });
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Parameter {
                name: "beta",
                range: "(0, 1)",
                value: beta,
            });
        }
        Ok(Self {
            alpha_prime,
            beta,
            budget,
            bound,
        })
    }
}

// Products like 0.1 * 30 land an ulp above the integer; snap those back.
fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x
    }
}

/// 1-based ranks `ceil(a n) ..= floor(2 a n)` fed to the interior point step.
pub fn rank_window(n: usize, alpha_prime: f64) -> Result<(usize, usize)> {
    let an = snap(alpha_prime * n as f64);
    let lo = an.ceil().max(1.0) as usize;
    let hi = (snap(2.0 * alpha_prime * n as f64).floor() as usize).min(n);
    if n == 0 || hi < lo {
        return Err(Error::DegenerateWindow { lo, hi, n });
    }
    Ok((lo, hi))
}

/// Both conditions of an `alpha'`-robust minimum:
/// `alpha' n <= |{x <= r}| <= 2 alpha' n`.
pub fn is_robust_min(data: &SortedIntDataset, r: u64, alpha_prime: f64) -> bool {
    let n = data.len() as f64;
    let below = data.rank(r) as f64;
    below >= snap(alpha_prime * n) && below <= snap(2.0 * alpha_prime * n)
}

/// Interior point of the rank window under the exponential mechanism.
pub fn robust_min_pure<R: Rng + ?Sized>(
    data: &SortedIntDataset,
    params: &RobustMinParams,
    rng: &mut R,
) -> Result<u64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let (lo, hi) = rank_window(data.len(), params.alpha_prime)?;
    let window = SortedIntDataset::new(data.values()[lo - 1..hi].to_vec(), params.bound)?;
    exp_mech_interior_point(&window, params.budget.epsilon, rng)
}

/// `(epsilon, delta)` robust minimum. Runs the pure mechanism, which is in
/// particular `(epsilon, delta)`-private; `params.budget.delta` is charged
/// as given.
pub fn robust_min_approx<R: Rng + ?Sized>(
    data: &SortedIntDataset,
    params: &RobustMinParams,
    rng: &mut R,
) -> Result<u64> {
    robust_min_pure(data, params, rng)
}

/// Size of the implicit item domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DomainSize {
    Count(u64),
    /// `2^bits` items.
    PowerOfTwo(u32),
}

impl DomainSize {
    /// `ln(R - distinct)`, or `None` when every domain item was observed.
    /// Fails if fewer items exist than were observed.
    pub fn ln_unobserved(&self, distinct: usize) -> Result<Option<f64>> {
        let too_small = || Error::DomainTooSmall {
            domain: format!("{self:?}"),
            distinct,
        };
        match *self {
            DomainSize::Count(r) => match r.checked_sub(distinct as u64) {
                None => Err(too_small()),
                Some(0) => Ok(None),
                Some(rest) => Ok(Some((rest as f64).ln())),
            },
            DomainSize::PowerOfTwo(bits) if bits < 64 => DomainSize::Count(1u64 << bits).ln_unobserved(distinct),
            DomainSize::PowerOfTwo(bits) => {
                let frac = distinct as f64 * (-(bits as f64)).exp2();
                Ok(Some(bits as f64 * std::f64::consts::LN_2 + (-frac).ln_1p()))
            }
        }
    }

    pub fn ln(&self) -> f64 {
        match *self {
            DomainSize::Count(r) => (r as f64).ln(),
            DomainSize::PowerOfTwo(bits) => bits as f64 * std::f64::consts::LN_2,
        }
    }
}

/// Result of a most-frequent-item query; `None` means no stable mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreqOutcome {
    pub item: Option<Vec<u8>>,
}

impl FreqOutcome {
    pub fn sentinel() -> Self {
        Self { item: None }
    }

    pub fn is_sentinel(&self) -> bool {
        self.item.is_none()
    }
}

fn histogram<T: AsRef<[u8]>>(items: &[T]) -> BTreeMap<&[u8], u64> {
    let mut counts = BTreeMap::new();
    for it in items {
        *counts.entry(it.as_ref()).or_insert(0u64) += 1;
    }
    counts
}

/// The exponential-mechanism distribution over outcomes, with all unobserved
/// domain items merged into one sentinel outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqTable {
    /// Observed items with their counts, lexicographic order.
    pub observed: Vec<(Vec<u8>, u64)>,
    /// `ln` of the number of unobserved domain items, each with score 0.
    pub ln_unobserved: Option<f64>,
}

impl FreqTable {
    pub fn build<T: AsRef<[u8]>>(items: &[T], domain: DomainSize) -> Result<Self> {
        let counts = histogram(items);
        let ln_unobserved = domain.ln_unobserved(counts.len())?;
        Ok(Self {
            observed: counts.into_iter().map(|(k, v)| (k.to_vec(), v)).collect(),
            ln_unobserved,
        })
    }

    /// Log-weights, observed items first and the sentinel last.
    pub fn log_weights(&self, epsilon: f64) -> Vec<f64> {
        let mut w: Vec<f64> = self.observed.iter().map(|(_, c)| epsilon * *c as f64 / 2.0).collect();
        w.push(self.ln_unobserved.unwrap_or(f64::NEG_INFINITY));
        w
    }

    pub fn probabilities(&self, epsilon: f64) -> Vec<f64> {
        let lw = self.log_weights(epsilon);
        let top = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = lw.iter().map(|x| (x - top).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    }
}

/// Pure most-frequent item: exponential mechanism with score `freq_S(x)`
/// over a domain of `domain` items. An unobserved item, if drawn, comes back
/// as the sentinel.
pub fn most_frequent_pure<T: AsRef<[u8]>, R: Rng + ?Sized>(
    items: &[T],
    domain: DomainSize,
    epsilon: f64,
    beta: f64,
    rng: &mut R,
) -> Result<FreqOutcome> {
    check_eps_beta(epsilon, beta)?;
    if items.is_empty() {
        return Ok(FreqOutcome::sentinel());
    }
    let table = FreqTable::build(items, domain)?;
    let pick = sample_log_weights(&table.log_weights(epsilon), rng);
    Ok(FreqOutcome {
        item: table.observed.get(pick).map(|(k, _)| k.clone()),
    })
}

/// Threshold `1 + ceil(2 ln(2 / delta) / epsilon)` for surviving noisy counts.
pub fn approx_threshold(epsilon: f64, delta: f64) -> i64 {
    1 + (2.0 * (2.0 / delta).ln() / epsilon).ceil() as i64
}

/// Gap `ceil(8 ln(4n / (delta beta)) / epsilon)` under which the approximate
/// variant returns the mode w.p. `>= 1 - beta`.
pub fn approx_gap(n: usize, epsilon: f64, delta: f64, beta: f64) -> u64 {
    (8.0 * (4.0 * n as f64 / (delta * beta)).ln() / epsilon).ceil() as u64
}

/// Survivors of the stable histogram for fixed noise, and their argmax
/// (ties go to the lexicographically smallest item).
pub fn stable_histogram_select<'a>(
    counts: &BTreeMap<&'a [u8], u64>,
    mut noise: impl FnMut(&[u8]) -> i64,
    threshold: i64,
) -> (Vec<&'a [u8]>, Option<&'a [u8]>) {
    let mut survivors = Vec::new();
    let mut best: Option<(&[u8], i64)> = None;
    for (&item, &c) in counts {
        let noisy = c as i64 + noise(item);
        if noisy < threshold {
            continue;
        }
        survivors.push(item);
        if best.is_none_or(|(_, b)| noisy > b) {
            best = Some((item, noisy));
        }
    }
    (survivors, best.map(|(i, _)| i))
}

/// Approximate most-frequent item: two-sided geometric noise at
/// `epsilon / 2` on every observed count, drop noisy counts below
/// `approx_threshold`, return the largest survivor.
pub fn most_frequent_approx<T: AsRef<[u8]>, R: Rng + ?Sized>(
    items: &[T],
    epsilon: f64,
    delta: f64,
    beta: f64,
    rng: &mut R,
) -> Result<FreqOutcome> {
    check_eps_beta(epsilon, beta)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Delta(delta));
    }
    let noise = TwoSidedGeometric::new(epsilon / 2.0)?;
    let counts = histogram(items);
    let (_, best) = stable_histogram_select(&counts, |_| noise.sample(rng), approx_threshold(epsilon, delta));
    Ok(FreqOutcome {
        item: best.map(<[u8]>::to_vec),
    })
}

fn check_eps_beta(epsilon: f64, beta: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Epsilon(epsilon));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Parameter {
            name: "beta",
            range: "(0, 1)",
            value: beta,
        });
    }
    Ok(())
}
