//! The private PAC learner for one-way sequences.
//!
//! Pipeline, with the budget split in three equal parts:
//!
//! 1. keep the positive examples, sorted by index;
//! 2. privately count them; too few and the all-zero hypothesis is returned;
//! 3. privately pick a robust minimum `i*` of the positive indices;
//! 4. carry every positive with index `<= i*` forward to `i*`;
//! 5. privately pick the most frequent carried pair `<sigma*, b*>`;
//! 6. return the threshold hypothesis anchored at `(i*, sigma*, b*)`.
//!
//! Every internal failure (empty rank window, no stable mode) falls back to
//! the all-zero hypothesis, so the learner is total on arbitrary datasets.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::dp::{compose, noisy_count, split_thirds, PrivacyBudget, SortedIntDataset};
use crate::error::{Error, Result};
use crate::ows::{compute_forward, CoPath, Derived, Example, LabeledExample, Params};
use crate::select::{
    most_frequent_approx, most_frequent_pure, robust_min_approx, robust_min_pure, DomainSize, FreqOutcome,
    RobustMinParams,
};

/// Multiplier `C` in `required_sample_size`; the smallest value in
/// `{20, 40, 80, 160, 320}` for which the PAC calibration sweep succeeds at
/// d = 64, 256 and 1024.
pub const DEFAULT_SAMPLE_CONSTANT: f64 = 320.0;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    AllZero,
    Threshold {
        i_star: u64,
        sigma_star: BitString,
        b_star: bool,
    },
}

impl Hypothesis {
    pub fn eval(&self, params: &Params, x: &Example) -> bool {
        hypothesis_eval(params, self, x)
    }

    /// Tag byte (0 = all-zero, 1 = threshold), then for a threshold the bits
    /// `i* (k) || sigma* (d - k) || b* (1)` packed MSB-first and zero-padded.
    pub fn to_bytes(&self, params: &Params) -> Vec<u8> {
        match self {
            Hypothesis::AllZero => vec![0],
            Hypothesis::Threshold {
                i_star,
                sigma_star,
                b_star,
            } => {
                let body = BitString::concat(&[
                    &BitString::from_u64(*i_star, params.k() as usize),
                    sigma_star,
                    &BitString::from_u64(*b_star as u64, 1),
                ]);
                let mut out = vec![1];
                out.extend_from_slice(body.as_bytes());
                out
            }
        }
    }

    pub fn from_bytes(params: &Params, bytes: &[u8]) -> Result<Self> {
        match bytes.split_first() {
            Some((0, [])) => Ok(Hypothesis::AllZero),
            Some((1, body)) => {
                let body = BitString::from_bytes(params.d() + 1, body.to_vec())?;
                let k = params.k() as usize;
                let i_star = body.read_u64(0, k);
                let sigma_star = body.slice(k, params.sigma_bits());
                let b_star = body.get(params.d());
                Ok(Hypothesis::Threshold {
                    i_star,
                    sigma_star,
                    b_star,
                })
            }
            Some((tag, _)) if *tag > 1 => Err(Error::Encoding(format!("unknown hypothesis tag {tag}"))),
            _ => Err(Error::Encoding("truncated hypothesis".into())),
        }
    }

    pub fn to_json(&self, params: &Params) -> HypothesisJson {
        match self {
            Hypothesis::AllZero => HypothesisJson {
                d: params.d(),
                kind: HypothesisKind::AllZero,
                i_star: None,
                sigma_star: None,
                b_star: None,
            },
            Hypothesis::Threshold {
                i_star,
                sigma_star,
                b_star,
            } => HypothesisJson {
                d: params.d(),
                kind: HypothesisKind::Threshold,
                i_star: Some(BitString::from_u64(*i_star, params.k() as usize).to_hex()),
                sigma_star: Some(sigma_star.to_hex()),
                b_star: Some(*b_star as u8),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisKind {
    AllZero,
    Threshold,
}

/// JSON form of a hypothesis; all bit fields are hex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisJson {
    pub d: usize,
    pub kind: HypothesisKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub i_star: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sigma_star: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub b_star: Option<u8>,
}

impl HypothesisJson {
    pub fn into_hypothesis(self) -> Result<(Params, Hypothesis)> {
        let params = Params::new(self.d)?;
        let h = match self.kind {
            HypothesisKind::AllZero => Hypothesis::AllZero,
            HypothesisKind::Threshold => {
                let missing = |f: &str| Error::Encoding(format!("threshold hypothesis without {f}"));
                let i_bits = BitString::from_hex(params.k() as usize, &self.i_star.ok_or_else(|| missing("i_star"))?)?;
                let sigma_star = BitString::from_hex(params.sigma_bits(), &self.sigma_star.ok_or_else(|| missing("sigma_star"))?)?;
                let b_star = match self.b_star.ok_or_else(|| missing("b_star"))? {
                    0 => false,
                    1 => true,
                    b => return Err(Error::Encoding(format!("b_star must be 0 or 1, got {b}"))),
                };
                Hypothesis::Threshold {
                    i_star: i_bits.read_u64(0, params.k() as usize),
                    sigma_star,
                    b_star,
                }
            }
        };
        Ok((params, h))
    }
}

/// Threshold rule: 0 below `i*`; at `i*` match `sigma*`; above `i*` compute
/// forward from `sigma*` and match.
pub fn hypothesis_eval(params: &Params, h: &Hypothesis, x: &Example) -> bool {
    let Hypothesis::Threshold {
        i_star,
        sigma_star,
        b_star,
    } = h
    else {
        return false;
    };
    if x.i < *i_star {
        return false;
    }
    if x.i == *i_star {
        return *b_star && x.sigma == *sigma_star;
    }
    match compute_forward(params, x.i, *i_star, sigma_star) {
        Ok(Derived { sigma, fbit }) => fbit && sigma == x.sigma,
        Err(_) => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnConfig {
    pub alpha: f64,
    pub beta: f64,
    pub budget: PrivacyBudget,
    pub params: Params,
    /// `C` in `required_sample_size`.
    pub sample_constant: f64,
}

impl LearnConfig {
    pub fn new(params: Params, alpha: f64, beta: f64, budget: PrivacyBudget) -> Result<Self> {
        let unit = |name, value: f64| {
            if value > 0.0 && value < 1.0 {
                Ok(())
            } else {
                Err(Error::Parameter {
                    name,
                    range: "(0, 1)",
                    value,
                })
            }
        };
        unit("alpha", alpha)?;
        unit("beta", beta)?;
        PrivacyBudget::new(budget.epsilon, budget.delta)?;
        Ok(Self {
            alpha,
            beta,
            budget,
            params,
            sample_constant: DEFAULT_SAMPLE_CONSTANT,
        })
    }

    pub fn with_sample_constant(mut self, c: f64) -> Self {
        self.sample_constant = c;
        self
    }
}

/// `max(ceil(C (sqrt d + ln(1/beta)) / (alpha eps)), ceil(8 ln(2/beta) / alpha))`.
pub fn required_sample_size(cfg: &LearnConfig) -> u64 {
    let d = cfg.params.d() as f64;
    let main = cfg.sample_constant * (d.sqrt() + (1.0 / cfg.beta).ln()) / (cfg.alpha * cfg.budget.epsilon);
    main.ceil().max(generalization_floor(cfg.alpha, cfg.beta) as f64) as u64
}

/// `ceil(8 ln(2/beta) / alpha)`: below this the Chernoff step fails.
pub fn generalization_floor(alpha: f64, beta: f64) -> u64 {
    (8.0 * (2.0 / beta).ln() / alpha).ceil() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Count,
    RobustMin,
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Charge {
    pub stage: Stage,
    pub budget: PrivacyBudget,
}

/// Where the pipeline stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exit {
    Complete,
    LowCount,
    DegenerateWindow,
    EmptyPrefix,
    NoStableMode,
}

#[derive(Debug, Clone)]
pub struct LearnReport {
    pub hypothesis: Hypothesis,
    /// One entry per private stage; the three together make up the budget
    /// of the whole run whether or not it stopped early.
    pub charges: Vec<Charge>,
    pub total: PrivacyBudget,
    pub exit: Exit,
    pub noisy_count: i64,
    pub i_star: Option<u64>,
    /// Number of positives with index `<= i*`.
    pub prefix_len: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Variant {
    Pure,
    Approx,
}

/// Pure `epsilon`-DP learner. Requires `cfg.budget.delta == 0`.
pub fn learn_pure<R: Rng + ?Sized>(samples: &[LabeledExample], cfg: &LearnConfig, rng: &mut R) -> Result<LearnReport> {
    if !cfg.budget.is_pure() {
        return Err(Error::Delta(cfg.budget.delta));
    }
    learn(samples, cfg, Variant::Pure, rng)
}

/// `(epsilon, delta)`-DP learner with the approximate selection subroutines.
/// Requires `cfg.budget.delta > 0`.
pub fn learn_approx<R: Rng + ?Sized>(samples: &[LabeledExample], cfg: &LearnConfig, rng: &mut R) -> Result<LearnReport> {
    if cfg.budget.is_pure() {
        return Err(Error::Delta(cfg.budget.delta));
    }
    learn(samples, cfg, Variant::Approx, rng)
}

/// Serialized `<sigma, b>` pair: sigma bytes followed by one label byte.
fn pair_bytes(sigma: &BitString, b: bool) -> Vec<u8> {
    let mut out = sigma.as_bytes().to_vec();
    out.push(b as u8);
    out
}

fn split_pair(params: &Params, bytes: &[u8]) -> Result<(BitString, bool)> {
    let (label, sigma) = bytes.split_last().ok_or_else(|| Error::Encoding("empty pair".into()))?;
    Ok((BitString::from_bytes(params.sigma_bits(), sigma.to_vec())?, *label == 1))
}

fn learn<R: Rng + ?Sized>(samples: &[LabeledExample], cfg: &LearnConfig, variant: Variant, rng: &mut R) -> Result<LearnReport> {
    let params = cfg.params;
    for s in samples {
        s.validate(&params)?;
    }
    let n = samples.len();
    let eps = split_thirds(cfg.budget.epsilon);
    let (delta_min, delta_freq) = match variant {
        Variant::Pure => (0.0, 0.0),
        Variant::Approx => (cfg.budget.delta / 2.0, cfg.budget.delta / 2.0),
    };
    let charges = vec![
        Charge {
            stage: Stage::Count,
            budget: PrivacyBudget::pure(eps[0])?,
        },
        Charge {
            stage: Stage::RobustMin,
            budget: PrivacyBudget::new(eps[1], delta_min)?,
        },
        Charge {
            stage: Stage::Frequency,
            budget: PrivacyBudget::new(eps[2], delta_freq)?,
        },
    ];
    let total = compose(&charges.iter().map(|c| c.budget).collect::<Vec<_>>())?;
    let mut report = LearnReport {
        hypothesis: Hypothesis::AllZero,
        charges,
        total,
        exit: Exit::LowCount,
        noisy_count: 0,
        i_star: None,
        prefix_len: 0,
    };

    // Step 1
    let mut positives: Vec<&Example> = samples.iter().filter(|s| s.label).map(|s| &s.example).collect();
    positives.sort_by_key(|x| x.i);

    // Step 2
    let m_hat = noisy_count(positives.len() as u64, eps[0], rng)?;
    report.noisy_count = m_hat;
    if n == 0 || at_most_scaled(3 * m_hat, cfg.alpha, n as u64) {
        return Ok(report);
    }

    // Step 3: indices shift to [1, 2^k] for the interior point domain.
    let alpha_prime = (cfg.alpha * n as f64 / (6.0 * m_hat as f64)).min(0.5);
    let bound = params.index_count();
    let indices = SortedIntDataset::new(positives.iter().map(|x| x.i + 1).collect(), bound)?;
    let min_params = RobustMinParams::new(alpha_prime, cfg.beta / 6.0, report.charges[1].budget, bound)?;
    let r = match variant {
        Variant::Pure => robust_min_pure(&indices, &min_params, rng),
        Variant::Approx => robust_min_approx(&indices, &min_params, rng),
    };
    let i_star = match r {
        Ok(r) => r - 1,
        // Noise can carry the count past the gate with few or no positives.
        Err(Error::DegenerateWindow { .. } | Error::EmptyDataset) => {
            report.exit = Exit::DegenerateWindow;
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.i_star = Some(i_star);

    // Step 4
    let prefix_len = positives.partition_point(|x| x.i <= i_star);
    report.prefix_len = prefix_len;
    if prefix_len == 0 {
        report.exit = Exit::EmptyPrefix;
        return Ok(report);
    }
    let mut forward_cache: HashMap<(u64, &BitString), Derived> = HashMap::new();
    let mut pairs: Vec<Vec<u8>> = Vec::with_capacity(prefix_len);
    for x in &positives[..prefix_len] {
        let (sigma, b) = if x.i < i_star {
            let d = forward_cache
                .entry((x.i, &x.sigma))
                .or_insert_with(|| compute_forward(&params, i_star, x.i, &x.sigma).expect("i_j < i* < 2^k, lengths validated"));
            (d.sigma.clone(), d.fbit)
        } else {
            // Only well-formed co-path strings for i* belong to the output
            // range; anything else carries no vote.
            let canonical = CoPath::parse(&params, i_star, &x.sigma)?.serialize(&params);
            if canonical != x.sigma {
                continue;
            }
            (x.sigma.clone(), true)
        };
        pairs.push(pair_bytes(&sigma, b));
    }

    // Step 5: the output range is every co-path string for i* with a label bit.
    let mode = match variant {
        Variant::Pure => {
            let domain = DomainSize::PowerOfTwo(params.k() * params.zero_bits(i_star) + 1);
            most_frequent_pure(&pairs, domain, eps[2], cfg.beta / 6.0, rng)?
        }
        Variant::Approx => most_frequent_approx(&pairs, eps[2], delta_freq, cfg.beta / 6.0, rng)?,
    };

    // Step 6
    report.exit = Exit::NoStableMode;
    if let FreqOutcome { item: Some(bytes) } = mode {
        let (sigma_star, b_star) = split_pair(&params, &bytes)?;
        report.hypothesis = Hypothesis::Threshold {
            i_star,
            sigma_star,
            b_star,
        };
        report.exit = Exit::Complete;
    }
    Ok(report)
}

/// `lhs <= alpha * n`, decided exactly on the binary expansion of `alpha`.
fn at_most_scaled(lhs: i64, alpha: f64, n: u64) -> bool {
    debug_assert!(alpha > 0.0 && alpha.is_finite());
    if lhs <= 0 {
        return true;
    }
    let bits = alpha.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1 << 52) - 1);
    let (mant, exp) = if biased == 0 {
        (frac, -1074)
    } else {
        (frac | 1 << 52, biased - 1075)
    };
    let rhs = mant as u128 * n as u128;
    let lhs = lhs as u128;
    if exp >= 0 {
        return lhs <= rhs << exp;
    }
    let shift = (-exp) as u32;
    if shift >= lhs.leading_zeros() {
        return false;
    }
    (lhs << shift) <= rhs
}

/// Fraction of `samples` the hypothesis gets wrong. Repeated examples are
/// evaluated once.
pub fn sample_loss(params: &Params, h: &Hypothesis, samples: &[LabeledExample]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let mut seen: HashMap<&Example, bool> = HashMap::new();
    let wrong = samples
        .iter()
        .filter(|s| *seen.entry(&s.example).or_insert_with(|| h.eval(params, &s.example)) != s.label)
        .count();
    wrong as f64 / samples.len() as f64
}
