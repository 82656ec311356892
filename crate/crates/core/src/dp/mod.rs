//! Differential-privacy primitives: integer (two-sided geometric) noise, the
//! exponential mechanism for the interior point problem, and basic
//! sequential composition.
//!
//! All samplers draw only from the generator handed to them, so outputs are
//! deterministic functions of the inputs and the generator state. The privacy
//! guarantees assume ideal randomness and exact real arithmetic; the f64
//! sampling here is not hardened against floating-point side channels.

mod budget;
mod geometric;
mod interior;

pub use budget::{compose, split_thirds, PrivacyBudget};
pub use geometric::{noisy_count, two_sided_geometric, RatioAudit, TwoSidedGeometric};
pub use interior::{exp_mech_interior_point, interior_score, IntervalPiece, SortedIntDataset};

use rand::Rng;

/// Draws an index with probability proportional to `exp(log_weights[i])`.
pub(crate) fn sample_log_weights<R: Rng + ?Sized>(log_weights: &[f64], rng: &mut R) -> usize {
    debug_assert!(!log_weights.is_empty());
    let top = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_weights.iter().map(|w| (w - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (idx, w) in weights.iter().enumerate() {
        if u < *w {
            return idx;
        }
        u -= w;
    }
    // Rounding residue; land on the last positive weight.
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}
