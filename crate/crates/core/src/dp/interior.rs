use rand::Rng;
use serde::Serialize;

use super::sample_log_weights;
use crate::error::{Error, Result};

/// A nondecreasing sequence of integers in `[1, bound]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortedIntDataset {
    values: Vec<u64>,
    bound: u64,
}

impl SortedIntDataset {
    pub fn new(values: Vec<u64>, bound: u64) -> Result<Self> {
        let in_range = values.iter().all(|&v| (1..=bound).contains(&v));
        if !in_range || !values.is_sorted() {
            return Err(Error::UnsortedDataset { bound });
        }
        Ok(Self { values, bound })
    }

    pub fn from_unsorted(mut values: Vec<u64>, bound: u64) -> Result<Self> {
        values.sort_unstable();
        Self::new(values, bound)
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_interior(&self, r: u64) -> bool {
        match (self.values.first(), self.values.last()) {
            (Some(&lo), Some(&hi)) => lo <= r && r <= hi,
            _ => false,
        }
    }

    /// Number of elements `<= r`.
    pub fn rank(&self, r: u64) -> usize {
        self.values.partition_point(|&v| v <= r)
    }

    /// The piecewise-constant score: maximal runs of `[1, bound]` on which
    /// `interior_score` is constant, in increasing order.
    pub fn pieces(&self) -> Vec<IntervalPiece> {
        let n = self.values.len();
        let f = |t: usize| t.min(n - t) as u64;
        let half = n / 2;
        let mut out = Vec::new();
        let mut push = |lo: u64, hi: u64, score: u64| {
            if lo <= hi {
                out.push(IntervalPiece { lo, hi, score });
            }
        };
        let Some(&first) = self.values.first() else {
            push(1, self.bound, 0);
            return out;
        };
        push(1, first - 1, 0);
        let mut below = 0usize;
        let mut idx = 0usize;
        while idx < n {
            let v = self.values[idx];
            let run = self.values[idx..].partition_point(|&x| x == v);
            let (a, b) = (below, below + run);
            // max of min(t, n - t) over t in [a, b]
            push(v, v, f(half.clamp(a, b)));
            below = b;
            idx += run;
            let next = self.values.get(idx).copied().unwrap_or(self.bound + 1);
            push(v + 1, next - 1, f(below));
        }
        out
    }
}

/// `[lo, hi]` (inclusive) with a common score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IntervalPiece {
    pub lo: u64,
    pub hi: u64,
    pub score: u64,
}

impl IntervalPiece {
    pub fn width(&self) -> u64 {
        self.hi - self.lo + 1
    }
}

/// `q(S, r)`: the largest `min(t, n - t)` over `t in [0, n]` with
/// `x_(t) <= r <= x_(t+1)`, taking `x_(0) = 1` and `x_(n+1) = bound`.
pub fn interior_score(data: &SortedIntDataset, r: u64) -> u64 {
    let n = data.len();
    let lo_t = data.values.partition_point(|&v| v < r);
    let hi_t = data.rank(r);
    (n / 2).clamp(lo_t, hi_t).min(n - (n / 2).clamp(lo_t, hi_t)) as u64
}

/// Exponential mechanism with score `interior_score`, sampling an interval
/// piece by total weight `width * exp(epsilon * score / 2)` and then a point
/// uniformly inside it. Runs in `O(n)` regardless of the domain bound.
pub fn exp_mech_interior_point<R: Rng + ?Sized>(
    data: &SortedIntDataset,
    epsilon: f64,
    rng: &mut R,
) -> Result<u64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Epsilon(epsilon));
    }
    let pieces = data.pieces();
    let log_weights: Vec<f64> = pieces
        .iter()
        .map(|p| (p.width() as f64).ln() + epsilon * p.score as f64 / 2.0)
        .collect();
    let chosen = pieces[sample_log_weights(&log_weights, rng)];
    Ok(rng.random_range(chosen.lo..=chosen.hi))
}
