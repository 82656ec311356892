//! The mistake-bound game against the reverse-order adversary.

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ows::{compute_forward, concept_eval, derive_example, Example, LabeledExample, Params, SeedKey};
use crate::rng::{self, stream};

/// A learner in the online game. The harness calls `predict` once per
/// round and only then reveals the label through `update`.
pub trait OnlineLearner {
    fn predict(&mut self, x: &Example) -> bool;
    fn update(&mut self, x: &Example, label: bool);
}

impl<L: OnlineLearner + ?Sized> OnlineLearner for Box<L> {
    fn predict(&mut self, x: &Example) -> bool {
        (**self).predict(x)
    }
    fn update(&mut self, x: &Example, label: bool) {
        (**self).update(x, label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub i: u64,
    pub prediction: bool,
    pub label: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRecord {
    /// Horizon `T`.
    pub horizon: usize,
    /// `R_T`, the number of rounds with a wrong prediction.
    pub mistakes: usize,
    /// Rounds in which the true label was 1.
    pub positives: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_round: Option<Vec<Round>>,
}

impl GameRecord {
    pub fn mistake_rate(&self) -> f64 {
        self.mistakes as f64 / self.horizon as f64
    }

    /// Mistakes of the better of the two constant predictors on this stream.
    pub fn best_constant_mistakes(&self) -> usize {
        self.positives.min(self.horizon - self.positives)
    }
}

/// Enforces the round order: an example is shown, a prediction is
/// committed, and only then is the label returned.
pub struct GameSession<'a> {
    params: Params,
    s: SeedKey,
    stream: &'a [LabeledExample],
    next: usize,
    awaiting: bool,
    mistakes: usize,
    positives: usize,
    transcript: Option<Vec<Round>>,
}

impl<'a> GameSession<'a> {
    pub fn new(params: Params, s: SeedKey, stream: &'a [LabeledExample], keep_transcript: bool) -> Result<Self> {
        if stream.is_empty() {
            return Err(Error::Protocol("empty stream"));
        }
        Ok(Self {
            params,
            s,
            stream,
            next: 0,
            awaiting: false,
            mistakes: 0,
            positives: 0,
            transcript: keep_transcript.then(Vec::new),
        })
    }

    /// The next example, or `None` once the stream is exhausted.
    pub fn next_example(&mut self) -> Result<Option<&'a Example>> {
        if self.awaiting {
            return Err(Error::Protocol("previous round has no committed prediction"));
        }
        let stream = self.stream;
        let Some(x) = stream.get(self.next) else {
            return Ok(None);
        };
        self.awaiting = true;
        Ok(Some(&x.example))
    }

    /// Commits the prediction for the outstanding example and returns its
    /// label under the concept.
    pub fn commit(&mut self, prediction: bool) -> Result<bool> {
        if !self.awaiting {
            return Err(Error::Protocol("prediction without an outstanding example"));
        }
        let x = &self.stream[self.next].example;
        let label = concept_eval(&self.params, &self.s, x);
        self.awaiting = false;
        self.next += 1;
        self.mistakes += (prediction != label) as usize;
        self.positives += label as usize;
        if let Some(t) = &mut self.transcript {
            t.push(Round {
                i: x.i,
                prediction,
                label,
            });
        }
        Ok(label)
    }

    pub fn finish(self) -> Result<GameRecord> {
        if self.awaiting || self.next < self.stream.len() {
            return Err(Error::Protocol("game stopped before the end of the stream"));
        }
        Ok(GameRecord {
            horizon: self.stream.len(),
            mistakes: self.mistakes,
            positives: self.positives,
            per_round: self.transcript,
        })
    }
}

/// On-sequence examples `i = 2^k - 1, 2^k - 2, ..., 2^k - T`, each labeled
/// by its hidden bit.
pub fn reverse_stream(s: &SeedKey, params: &Params, t: u64) -> Result<Vec<LabeledExample>> {
    if t > params.index_count() {
        return Err(Error::StreamLength {
            requested: t,
            available: params.index_count(),
        });
    }
    let top = params.top_index();
    (0..t).map(|r| LabeledExample::on_sequence(params, s, top - r)).collect()
}

pub fn run_online_game<L: OnlineLearner + ?Sized>(
    learner: &mut L,
    stream: &[LabeledExample],
    params: &Params,
    s: &SeedKey,
    keep_transcript: bool,
) -> Result<GameRecord> {
    let mut session = GameSession::new(*params, *s, stream, keep_transcript)?;
    while let Some(x) = session.next_example()? {
        let prediction = learner.predict(x);
        let label = session.commit(prediction)?;
        learner.update(x, label);
    }
    session.finish()
}

pub struct ConstantLearner(pub bool);

impl OnlineLearner for ConstantLearner {
    fn predict(&mut self, _: &Example) -> bool {
        self.0
    }
    fn update(&mut self, _: &Example, _: bool) {}
}

pub struct RandomLearner(pub rng::Rng);

impl OnlineLearner for RandomLearner {
    fn predict(&mut self, _: &Example) -> bool {
        self.0.random()
    }
    fn update(&mut self, _: &Example, _: bool) {}
}

/// Remembers the lowest-index positive example and predicts by computing
/// forward from it; predicts 0 at or below that index unless the example is
/// the stored one.
pub struct ForwardPredictor {
    params: Params,
    anchor: Option<Example>,
}

impl ForwardPredictor {
    pub fn new(params: Params) -> Self {
        Self { params, anchor: None }
    }
}

impl OnlineLearner for ForwardPredictor {
    fn predict(&mut self, x: &Example) -> bool {
        match &self.anchor {
            Some(a) if x.i > a.i => compute_forward(&self.params, x.i, a.i, &a.sigma)
                .map(|d| d.fbit && d.sigma == x.sigma)
                .unwrap_or(false),
            Some(a) => x == a,
            None => false,
        }
    }

    fn update(&mut self, x: &Example, label: bool) {
        if label && self.anchor.as_ref().is_none_or(|a| x.i < a.i) {
            self.anchor = Some(x.clone());
        }
    }
}

#[derive(Default)]
pub struct MajoritySoFar {
    ones: u64,
    zeros: u64,
}

impl OnlineLearner for MajoritySoFar {
    fn predict(&mut self, _: &Example) -> bool {
        self.ones > self.zeros
    }
    fn update(&mut self, _: &Example, label: bool) {
        if label {
            self.ones += 1;
        } else {
            self.zeros += 1;
        }
    }
}

#[derive(Default)]
pub struct LastLabel(bool);

impl OnlineLearner for LastLabel {
    fn predict(&mut self, _: &Example) -> bool {
        self.0
    }
    fn update(&mut self, _: &Example, label: bool) {
        self.0 = label;
    }
}

/// Weighted majority over a pool of experts, each wrong expert's weight
/// multiplied by `1 - eta` per mistake.
pub struct MultiplicativeWeights {
    experts: Vec<Box<dyn OnlineLearner + Send>>,
    weights: Vec<f64>,
    votes: Vec<bool>,
    eta: f64,
}

impl MultiplicativeWeights {
    pub fn new(experts: Vec<Box<dyn OnlineLearner + Send>>, eta: f64) -> Self {
        let n = experts.len();
        Self {
            experts,
            weights: vec![1.0; n],
            votes: vec![false; n],
            eta,
        }
    }

    /// The pool {constant 0, constant 1, forward, last label, majority}.
    pub fn standard_pool(params: Params) -> Self {
        Self::new(
            vec![
                Box::new(ConstantLearner(false)),
                Box::new(ConstantLearner(true)),
                Box::new(ForwardPredictor::new(params)),
                Box::new(LastLabel::default()),
                Box::new(MajoritySoFar::default()),
            ],
            0.1,
        )
    }
}

impl OnlineLearner for MultiplicativeWeights {
    fn predict(&mut self, x: &Example) -> bool {
        let mut mass = [0.0f64; 2];
        for (e, (w, v)) in self.experts.iter_mut().zip(self.weights.iter().zip(self.votes.iter_mut())) {
            *v = e.predict(x);
            mass[*v as usize] += w;
        }
        mass[1] > mass[0]
    }

    fn update(&mut self, x: &Example, label: bool) {
        let mut total = 0.0;
        for (e, (w, v)) in self.experts.iter_mut().zip(self.weights.iter_mut().zip(&self.votes)) {
            if *v != label {
                *w *= 1.0 - self.eta;
            }
            total += *w;
            e.update(x, label);
        }
        for w in &mut self.weights {
            *w /= total;
        }
    }
}

/// Knows the key and answers with the concept itself.
pub struct Omniscient {
    params: Params,
    s: SeedKey,
}

impl Omniscient {
    pub fn new(params: Params, s: SeedKey) -> Self {
        Self { params, s }
    }
}

impl OnlineLearner for Omniscient {
    fn predict(&mut self, x: &Example) -> bool {
        concept_eval(&self.params, &self.s, x)
    }
    fn update(&mut self, _: &Example, _: bool) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Baseline {
    Constant0,
    Constant1,
    Random,
    Forward,
    Majority,
    LastLabel,
    Mw,
    Omniscient,
}

impl Baseline {
    /// Every learner that does not hold the key.
    pub const EFFICIENT: [Baseline; 7] = [
        Baseline::Constant0,
        Baseline::Constant1,
        Baseline::Random,
        Baseline::Forward,
        Baseline::Majority,
        Baseline::LastLabel,
        Baseline::Mw,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Baseline::Constant0 => "constant-0",
            Baseline::Constant1 => "constant-1",
            Baseline::Random => "random",
            Baseline::Forward => "forward",
            Baseline::Majority => "majority",
            Baseline::LastLabel => "last-label",
            Baseline::Mw => "mw",
            Baseline::Omniscient => "omniscient",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::EFFICIENT
            .into_iter()
            .chain([Baseline::Omniscient])
            .find(|b| b.name() == name)
    }

    /// A fresh learner; `seed` drives the random baseline and `s` is used
    /// only by the omniscient one.
    pub fn build(&self, params: Params, s: SeedKey, seed: u64) -> Box<dyn OnlineLearner + Send> {
        match self {
            Baseline::Constant0 => Box::new(ConstantLearner(false)),
            Baseline::Constant1 => Box::new(ConstantLearner(true)),
            Baseline::Random => Box::new(RandomLearner(rng::Rng::seed_from_u64(seed))),
            Baseline::Forward => Box::new(ForwardPredictor::new(params)),
            Baseline::Majority => Box::new(MajoritySoFar::default()),
            Baseline::LastLabel => Box::new(LastLabel::default()),
            Baseline::Mw => Box::new(MultiplicativeWeights::standard_pool(params)),
            Baseline::Omniscient => Box::new(Omniscient::new(params, s)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageReport {
    pub t: u64,
    pub trials: u64,
    pub correct: u64,
    /// Empirical `Pr[prediction = f(t, s)]`.
    pub advantage: f64,
    /// Whether each trial's prediction was right, in trial order.
    #[serde(skip)]
    pub per_trial: Vec<bool>,
}

/// For each trial: a fresh key, the suffix `2^k - 1 .. t + 1` played as an
/// online game, then a prediction on `(t, G(t, s))` scored against
/// `f(t, s)`. Trials run in parallel on independent streams derived from one
/// draw of `rng`.
pub fn prediction_advantage<F, L, R>(make: F, t: u64, trials: u64, params: &Params, rng: &mut R) -> Result<AdvantageReport>
where
    F: Fn(&SeedKey, u64) -> L + Sync,
    L: OnlineLearner,
    R: Rng + ?Sized,
{
    if t + 1 >= params.index_count() {
        return Err(Error::IndexOutOfRange {
            index: t,
            k: params.k(),
        });
    }
    let base: u64 = rng.random();
    let suffix = params.top_index() - t;
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<bool> {
            let mut r = stream(base, trial);
            let s = SeedKey::random(params, &mut r);
            let mut learner = make(&s, r.random());
            let run = reverse_stream(&s, params, suffix)?;
            run_online_game(&mut learner, &run, params, &s, false)?;
            let target = derive_example(params, &s, t)?;
            let guess = learner.predict(&Example {
                i: t,
                sigma: target.sigma,
            });
            Ok(guess == target.fbit)
        })
        .collect::<Result<Vec<bool>>>()?;
    let correct = per_trial.iter().filter(|&&c| c).count() as u64;
    Ok(AdvantageReport {
        t,
        trials,
        correct,
        advantage: correct as f64 / trials as f64,
        per_trial,
    })
}
