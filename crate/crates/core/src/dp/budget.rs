use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(epsilon, delta)`; `delta = 0` is pure differential privacy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget {
    pub epsilon: f64,
    pub delta: f64,
}

impl PrivacyBudget {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::Epsilon(epsilon));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::Delta(delta));
        }
        Ok(Self { epsilon, delta })
    }

    pub fn pure(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0)
    }

    pub fn is_pure(&self) -> bool {
        self.delta == 0.0
    }
}

/// Basic composition: budgets add componentwise.
pub fn compose(budgets: &[PrivacyBudget]) -> Result<PrivacyBudget> {
    let (first, rest) = budgets.split_first().ok_or(Error::EmptyComposition)?;
    Ok(rest.iter().fold(*first, |acc, b| PrivacyBudget {
        epsilon: acc.epsilon + b.epsilon,
        delta: acc.delta + b.delta,
    }))
}

/// Splits `x` into three parts whose left-to-right f64 sum is exactly `x`.
///
/// The first two parts are `x / 3`; the last is `x - 2 (x / 3)`, which is
/// computed without rounding (the operands are within a factor of two), so
/// it differs from `x / 3` by at most one ulp.
pub fn split_thirds(x: f64) -> [f64; 3] {
    let third = x / 3.0;
    [third, third, x - 2.0 * third]
}
