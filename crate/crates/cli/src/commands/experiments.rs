//! Monte Carlo experiments: PAC batches, online duels, prediction
//! advantage and the sample-size sweep.

use anyhow::{bail, Result};
use owslab::arena::pac::CalibrationPlan;
use owslab::arena::{calibrate as sweep, prediction_advantage, reverse_stream, run_online_game, run_pac_batch};
use owslab::arena::ExperimentReport;
use owslab::learner::required_sample_size;
use owslab::rng::stream;
use owslab::{LabeledExample, LearnConfig, Params, PrivacyBudget, SeedKey};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::baseline;
use crate::output::{row, Output};
use crate::params::{Advantage, Calibrate, Duel, Pac};

fn numbered(index: u64, value: impl serde::Serialize) -> Map<String, Value> {
    let mut r = Map::from_iter([("trial".to_owned(), json!(index))]);
    r.extend(row(value));
    r
}

pub fn pac(mut p: Pac) -> Result<Output> {
    let params = Params::new(p.d)?;
    let budget = PrivacyBudget::new(p.epsilon, p.delta)?;
    let cfg = LearnConfig::new(params, p.alpha, p.beta, budget)?.with_sample_constant(p.sample_constant);
    let n = match (p.n, p.auto_n) {
        (Some(_), true) => bail!("--n and --auto-n are mutually exclusive"),
        (Some(n), false) => n,
        (None, _) => required_sample_size(&cfg),
    };
    p.n = Some(n);
    let batch = run_pac_batch(&cfg, n as usize, p.trials, p.support, p.mc_samples, p.seed)?;
    let successes = batch.iter().filter(|r| r.success).count() as u64;
    let report = ExperimentReport::new("pac", serde_json::to_value(&p)?, p.trials, successes, p.seed);
    let rows = batch.iter().enumerate().map(|(t, r)| numbered(t as u64, r)).collect();
    Ok(Output::new(serde_json::to_value(report)?, rows))
}

fn adversary_stream(name: &str, s: &SeedKey, params: &Params, t: u64) -> Result<Vec<LabeledExample>> {
    let mut xs = reverse_stream(s, params, t)?;
    match name {
        "reverse" => {}
        "forward" => xs.reverse(),
        other => bail!("unknown adversary `{other}`; expected reverse or forward"),
    }
    Ok(xs)
}

pub fn duel(p: Duel) -> Result<Output> {
    let params = Params::new(p.d)?;
    let learner = baseline(&p.baseline)?;
    if p.t == 0 || p.t > params.index_count() {
        bail!("--t must be in 1..={}, got {}", params.index_count(), p.t);
    }
    if !(0.0..=1.0).contains(&p.margin) {
        bail!("--margin must be in [0, 1], got {}", p.margin);
    }
    adversary_stream(&p.adversary, &SeedKey::new(&params, 0)?, &params, 1)?;
    let games = (0..p.keys)
        .into_par_iter()
        .map(|key| -> Result<_> {
            let mut rng = stream(p.seed, key);
            let s = SeedKey::random(&params, &mut rng);
            let xs = adversary_stream(&p.adversary, &s, &params, p.t)?;
            let mut l = learner.build(params, s, rng.random());
            Ok((s, run_online_game(&mut l, &xs, &params, &s, false)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let (mut successes, mut mistakes, mut rounds) = (0, 0, 0);
    for (key, (s, g)) in games.iter().enumerate() {
        let best = g.best_constant_mistakes() as f64 / g.horizon as f64;
        let beat = g.mistake_rate() < best - p.margin;
        successes += beat as u64;
        mistakes += g.mistakes;
        rounds += g.horizon;
        rows.push(numbered(
            key as u64,
            json!({
                "s": s.to_hex(&params),
                "horizon": g.horizon,
                "mistakes": g.mistakes,
                "positives": g.positives,
                "mistake_rate": g.mistake_rate(),
                "best_constant_rate": best,
                "beat_constant": beat,
            }),
        ));
    }
    let rate = if rounds == 0 { 0.0 } else { mistakes as f64 / rounds as f64 };
    let report =
        ExperimentReport::new("duel", serde_json::to_value(&p)?, p.keys, successes, p.seed).with_mistake_rate(rate);
    Ok(Output::new(serde_json::to_value(report)?, rows))
}

pub fn advantage(mut p: Advantage) -> Result<Output> {
    let params = Params::new(p.d)?;
    let learner = baseline(&p.baseline)?;
    let t = p.t.unwrap_or(params.top_index().saturating_sub(33));
    p.t = Some(t);
    let r = prediction_advantage(
        |s, seed| learner.build(params, *s, seed),
        t,
        p.trials,
        &params,
        &mut stream(p.seed, 0),
    )?;
    let report = ExperimentReport::new("advantage", serde_json::to_value(&p)?, r.trials, r.correct, p.seed);
    let rows = r
        .per_trial
        .iter()
        .enumerate()
        .map(|(n, &correct)| numbered(n as u64, json!({ "correct": correct })))
        .collect();
    Ok(Output::new(serde_json::to_value(report)?, rows))
}

pub fn calibrate(p: Calibrate) -> Result<Output> {
    if p.constants.is_empty() || p.dims.is_empty() {
        bail!("--constants and --dims must be nonempty");
    }
    let plan = CalibrationPlan {
        constants: p.constants.clone(),
        dims: p.dims.clone(),
        alpha: p.alpha,
        beta: p.beta,
        budget: PrivacyBudget::new(p.epsilon, p.delta)?,
        trials: p.trials,
        support: p.support,
        mc_samples: p.mc_samples,
        slack: p.slack,
        seed: p.seed,
    };
    let r = sweep(&plan)?;
    let rows = r.rows.iter().map(row).collect();
    let passed = r.chosen.is_some();
    let report = json!({
        "experiment": "calibrate",
        "params": p,
        "threshold": r.threshold,
        "chosen": r.chosen,
        "rows": r.rows,
        "passed": passed,
    });
    Ok(Output::new(report, rows).checked(passed))
}
