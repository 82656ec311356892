use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::Serialize;

use crate::error::{Error, Result};

/// Two-sided geometric distribution: `Pr[Z = z] = (1 - g) / (1 + g) * g^|z|`
/// with `g = exp(-epsilon)`. Adding it to a sensitivity-1 integer query is
/// `epsilon`-differentially private.
#[derive(Debug, Clone, Copy)]
pub struct TwoSidedGeometric {
    epsilon: f64,
    gamma: f64,
}

/// Outcome of the exact DP-ratio check for shifts by one.
///
/// Every pmf ratio has the form `exp(epsilon * e)` for an integer `e`
/// (`pmf(z) / pmf(z') = g^(|z| - |z'|)`), so the check runs on the integer
/// exponents and is exact.
#[derive(Debug, Clone, Serialize)]
pub struct RatioAudit {
    pub epsilon: f64,
    pub window: i64,
    /// Largest exponent seen over the window, both shift directions.
    pub max_exponent_window: i64,
    /// Largest exponent beyond the window, from the closed form.
    pub max_exponent_tail: i64,
    /// Same maximum evaluated in floating point, for display.
    pub max_ratio_f64: f64,
    pub passed: bool,
}

impl TwoSidedGeometric {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::Epsilon(epsilon));
        }
        Ok(Self {
            epsilon,
            gamma: (-epsilon).exp(),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn pmf(&self, z: i64) -> f64 {
        let g = self.gamma;
        (1.0 - g) / (1.0 + g) * g.powf(z.unsigned_abs() as f64)
    }

    /// `Pr[|Z| > t] = 2 g^(t+1) / (1 + g)`, for `t >= 0`.
    pub fn tail(&self, t: u64) -> f64 {
        let g = self.gamma;
        2.0 * g.powf(t as f64 + 1.0) / (1.0 + g)
    }

    /// The integer `e` with `pmf(z) / pmf(z_other) = exp(epsilon * e)`.
    pub fn ratio_exponent(z: i64, z_other: i64) -> i64 {
        z_other.abs() - z.abs()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        // Difference of two iid failure counts with success probability 1 - g.
        let geo = Geometric::new(1.0 - self.gamma).expect("0 < 1 - gamma <= 1");
        let a = geo.sample(rng) as i64;
        let b = geo.sample(rng) as i64;
        a - b
    }

    /// Checks `pmf(z) <= e^epsilon * pmf(z +/- 1)` for every integer `z`:
    /// exhaustively on `|z| <= window`, and beyond it from the closed form
    /// `| |z +/- 1| - |z| | = 1` for `|z| >= 1`.
    pub fn audit_ratio(&self, window: i64) -> RatioAudit {
        let mut max_window = i64::MIN;
        let mut max_f64 = 0f64;
        for z in -window..=window {
            for other in [z - 1, z + 1] {
                let e = Self::ratio_exponent(z, other);
                max_window = max_window.max(e);
                max_f64 = max_f64.max(self.pmf(z) / self.pmf(other));
            }
        }
        // Past the window z and z +/- 1 share a sign, so |z'| - |z| = +/- 1.
        let max_tail = [window + 1, -(window + 1)]
            .into_iter()
            .flat_map(|z| [Self::ratio_exponent(z, z - 1), Self::ratio_exponent(z, z + 1)])
            .max()
            .unwrap_or(i64::MIN);
        RatioAudit {
            epsilon: self.epsilon,
            window,
            max_exponent_window: max_window,
            max_exponent_tail: max_tail,
            max_ratio_f64: max_f64,
            passed: max_window <= 1 && max_tail <= 1,
        }
    }
}

pub fn two_sided_geometric<R: Rng + ?Sized>(epsilon: f64, rng: &mut R) -> Result<i64> {
    Ok(TwoSidedGeometric::new(epsilon)?.sample(rng))
}

/// `count + Z` with `Z` two-sided geometric at `epsilon`.
pub fn noisy_count<R: Rng + ?Sized>(count: u64, epsilon: f64, rng: &mut R) -> Result<i64> {
    let z = two_sided_geometric(epsilon, rng)?;
    Ok(count as i64 + z)
}
