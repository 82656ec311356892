//! Report schema shared by every experiment.

use serde::{Deserialize, Serialize};

/// z-value of the two-sided 95% normal interval.
pub const Z95: f64 = 1.959_963_984_540_054;
/// z-value of the two-sided 99% normal interval.
pub const Z99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    /// Every resolved parameter of the run.
    pub params: serde_json::Value,
    pub trials: u64,
    pub successes: u64,
    /// Mistakes per round, for online experiments.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mistake_rate: Option<f64>,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl ExperimentReport {
    /// Fills the interval with the Wilson 95% interval of
    /// `successes / trials`.
    pub fn new(experiment: &str, params: serde_json::Value, trials: u64, successes: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z95);
        Self {
            experiment: experiment.to_owned(),
            params,
            trials,
            successes,
            mistake_rate: None,
            ci_low,
            ci_high,
            seed,
        }
    }

    pub fn with_mistake_rate(mut self, rate: f64) -> Self {
        self.mistake_rate = Some(rate);
        self
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Normal-approximation acceptance band `p +/- z sqrt(p (1 - p) / n)` for an
/// empirical frequency over `n` trials when the true rate is `p`.
pub fn binomial_band(p: f64, trials: u64, z: f64) -> (f64, f64) {
    let half = z * (p * (1.0 - p) / trials as f64).sqrt();
    (p - half, p + half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_values() {
        // 50 / 100 at 95%: 0.5 +/- 0.0962 (two decimals agree with tables).
        let (lo, hi) = wilson_interval(50, 100, Z95);
        assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4, "{lo} {hi}");
        let (lo, hi) = wilson_interval(0, 10, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.35);
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
    }

    #[test]
    fn band_at_half() {
        let (lo, hi) = binomial_band(0.5, 10_000, Z99);
        assert!((hi - 0.5 - Z99 * 0.005).abs() < 1e-15);
        assert!((0.5 - lo - Z99 * 0.005).abs() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let r = ExperimentReport::new("pac", serde_json::json!({"d": 64}), 10, 9, 7);
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["experiment", "params", "trials", "successes", "ci_low", "ci_high", "seed"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v.get("mistake_rate").is_none());
        let v = serde_json::to_value(r.with_mistake_rate(0.25)).unwrap();
        assert_eq!(v["mistake_rate"], 0.25);
    }
}
