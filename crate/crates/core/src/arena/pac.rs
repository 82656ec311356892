//! PAC trials on realizable distributions.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dp::PrivacyBudget;
use crate::error::{Error, Result};
use crate::learner::{learn_approx, learn_pure, required_sample_size, Exit, Hypothesis, LearnConfig};
use crate::ows::{concept_eval, Example, LabeledExample, Params, SeedKey};
use crate::rng::stream;

/// A distribution over examples labeled by the concept of `s`: a weighted
/// set of on-sequence points plus an optional uniform component over all of
/// `[2^k] x {0,1}^(d-k)`, which is negative except with negligible
/// probability and is labeled by the concept either way.
#[derive(Debug, Clone)]
pub struct RealizableDistribution {
    params: Params,
    s: SeedKey,
    points: Vec<LabeledExample>,
    weights: Vec<f64>,
    uniform_weight: f64,
    sampler: WeightedIndex<f64>,
}

enum Draw {
    Point(usize),
    Uniform(LabeledExample),
}

impl RealizableDistribution {
    /// `support` pairs on-sequence indices with weights; together with
    /// `uniform_weight` they must sum to 1.
    pub fn new(params: Params, s: SeedKey, support: &[(u64, f64)], uniform_weight: f64) -> Result<Self> {
        let bad = |value| Error::Parameter {
            name: "weight",
            range: "[0, 1], summing to 1",
            value,
        };
        let total = support.iter().map(|p| p.1).sum::<f64>() + uniform_weight;
        if support.iter().map(|p| p.1).chain([uniform_weight]).any(|w| !(0.0..=1.0).contains(&w)) || (total - 1.0).abs() > 1e-9 {
            return Err(bad(total));
        }
        if total == 0.0 || support.iter().all(|p| p.1 == 0.0) && uniform_weight == 0.0 {
            return Err(Error::EmptyDistribution);
        }
        let points = support
            .iter()
            .map(|&(i, _)| LabeledExample::on_sequence(&params, &s, i))
            .collect::<Result<Vec<_>>>()?;
        let weights: Vec<f64> = support.iter().map(|p| p.1).collect();
        let sampler = WeightedIndex::new(weights.iter().copied().chain([uniform_weight])).map_err(|_| Error::EmptyDistribution)?;
        Ok(Self {
            params,
            s,
            points,
            weights,
            uniform_weight,
            sampler,
        })
    }

    pub fn uniform_on(params: Params, s: SeedKey, indices: &[u64]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let w = 1.0 / indices.len() as f64;
        let support: Vec<_> = indices.iter().map(|&i| (i, w)).collect();
        Self::new(params, s, &support, 0.0)
    }

    /// Uniform over `count` distinct random on-sequence indices.
    pub fn random_support<R: Rng + ?Sized>(params: Params, s: SeedKey, count: usize, rng: &mut R) -> Result<Self> {
        let n = params.index_count();
        if count as u64 > n {
            return Err(Error::StreamLength {
                requested: count as u64,
                available: n,
            });
        }
        let mut indices: Vec<u64> = rand::seq::index::sample(rng, n as usize, count)
            .into_iter()
            .map(|i| i as u64)
            .collect();
        indices.sort_unstable();
        Self::uniform_on(params, s, &indices)
    }

    /// All mass on the uniform component.
    pub fn negatives_only(params: Params, s: SeedKey) -> Result<Self> {
        Self::new(params, s, &[], 1.0)
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn key(&self) -> &SeedKey {
        &self.s
    }

    pub fn support(&self) -> impl Iterator<Item = (&LabeledExample, f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Draw {
        let j = self.sampler.sample(rng);
        if j < self.points.len() {
            return Draw::Point(j);
        }
        let x = Example::random(&self.params, rng);
        let label = concept_eval(&self.params, &self.s, &x);
        Draw::Uniform(LabeledExample::new(x, label))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LabeledExample {
        match self.draw(rng) {
            Draw::Point(j) => self.points[j].clone(),
            Draw::Uniform(x) => x,
        }
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<LabeledExample> {
        (0..n).map(|_| self.sample(rng)).collect()
    }

    /// Exact population loss; available when there is no uniform component.
    pub fn exact_loss(&self, h: &Hypothesis) -> Option<f64> {
        (self.uniform_weight == 0.0).then(|| {
            self.support()
                .filter(|(x, _)| h.eval(&self.params, &x.example) != x.label)
                .map(|(_, w)| w)
                .sum()
        })
    }

    /// Mean loss over `samples` fresh draws. Support points are evaluated
    /// once each, since `h` is deterministic.
    pub fn estimate_loss<R: Rng + ?Sized>(&self, h: &Hypothesis, samples: usize, rng: &mut R) -> f64 {
        let mut verdict: Vec<Option<bool>> = vec![None; self.points.len()];
        let mut wrong = 0usize;
        for _ in 0..samples {
            let miss = match self.draw(rng) {
                Draw::Point(j) => *verdict[j].get_or_insert_with(|| {
                    let x = &self.points[j];
                    h.eval(&self.params, &x.example) != x.label
                }),
                Draw::Uniform(x) => h.eval(&self.params, &x.example) != x.label,
            };
            wrong += miss as usize;
        }
        wrong as f64 / samples as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacTrialReport {
    pub n: usize,
    pub sample_loss: f64,
    pub population_loss_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact_population_loss: Option<f64>,
    pub success: bool,
    pub exit: Exit,
    pub threshold: bool,
}

/// Draws `n` examples, learns (pure or approximate according to
/// `cfg.budget`), and scores the hypothesis on `mc_samples` fresh draws;
/// success means the estimate is at most `alpha`.
pub fn run_pac_trial<R: Rng + ?Sized>(
    dist: &RealizableDistribution,
    cfg: &LearnConfig,
    n: usize,
    mc_samples: usize,
    rng: &mut R,
) -> Result<PacTrialReport> {
    if n == 0 || mc_samples == 0 {
        return Err(Error::Parameter {
            name: if n == 0 { "n" } else { "mc_samples" },
            range: ">= 1",
            value: 0.0,
        });
    }
    if cfg.params != dist.params {
        return Err(Error::Protocol("config and distribution disagree on d"));
    }
    let data = dist.sample_n(n, rng);
    let report = if cfg.budget.is_pure() {
        learn_pure(&data, cfg, rng)?
    } else {
        learn_approx(&data, cfg, rng)?
    };
    let h = &report.hypothesis;
    let sample_loss = crate::learner::sample_loss(&dist.params, h, &data);
    let estimate = dist.estimate_loss(h, mc_samples, rng);
    Ok(PacTrialReport {
        n,
        sample_loss,
        population_loss_estimate: estimate,
        exact_population_loss: dist.exact_loss(h),
        success: estimate <= cfg.alpha,
        exit: report.exit,
        threshold: matches!(h, Hypothesis::Threshold { .. }),
    })
}

/// PAC trials on fresh keys: trial `t` draws its key, a uniform support of
/// `support` distinct indices, its data and its noise from stream
/// `(seed, t)`. Trials run in parallel; results are in trial order.
pub fn run_pac_batch(
    cfg: &LearnConfig,
    n: usize,
    trials: u64,
    support: usize,
    mc_samples: usize,
    seed: u64,
) -> Result<Vec<PacTrialReport>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, t);
            let s = SeedKey::random(&cfg.params, &mut rng);
            let dist = RealizableDistribution::random_support(cfg.params, s, support, &mut rng)?;
            run_pac_trial(&dist, cfg, n, mc_samples, &mut rng)
        })
        .collect()
}

/// Passing threshold for a batch: at least `(1 - beta) trials - slack`
/// successes.
pub fn batch_threshold(trials: u64, beta: f64, slack: f64) -> f64 {
    (1.0 - beta) * trials as f64 - slack
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub c: f64,
    pub d: usize,
    pub n: u64,
    pub trials: u64,
    pub successes: u64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub rows: Vec<CalibrationRow>,
    pub threshold: f64,
    /// Smallest constant passing at every dimension.
    pub chosen: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPlan {
    pub constants: Vec<f64>,
    pub dims: Vec<usize>,
    pub alpha: f64,
    pub beta: f64,
    pub budget: PrivacyBudget,
    pub trials: u64,
    pub support: usize,
    pub mc_samples: usize,
    pub slack: f64,
    pub seed: u64,
}

/// Sweeps the sample-size constant in increasing order and stops at the
/// first one that passes at every dimension.
pub fn calibrate(plan: &CalibrationPlan) -> Result<CalibrationReport> {
    let threshold = batch_threshold(plan.trials, plan.beta, plan.slack);
    let mut constants = plan.constants.clone();
    constants.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    let mut chosen = None;
    for &c in &constants {
        let mut all = true;
        for &d in &plan.dims {
            let cfg = LearnConfig::new(Params::new(d)?, plan.alpha, plan.beta, plan.budget)?.with_sample_constant(c);
            let n = required_sample_size(&cfg);
            let batch = run_pac_batch(&cfg, n as usize, plan.trials, plan.support, plan.mc_samples, plan.seed)?;
            let successes = batch.iter().filter(|r| r.success).count() as u64;
            let passed = successes as f64 >= threshold;
            all &= passed;
            rows.push(CalibrationRow {
                c,
                d,
                n,
                trials: plan.trials,
                successes,
                passed,
            });
            if !passed {
                break;
            }
        }
        if all {
            chosen = Some(c);
            break;
        }
    }
    Ok(CalibrationReport { rows, threshold, chosen })
}
