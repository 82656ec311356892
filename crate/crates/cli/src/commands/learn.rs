//! Learning from and evaluating on dataset files.

use std::path::Path;

use anyhow::{bail, Context, Result};
use owslab::learner::{learn_approx, learn_pure, required_sample_size, sample_loss, HypothesisJson};
use owslab::ows::ExampleRecord;
use owslab::rng::stream;
use owslab::{Hypothesis, LabeledExample, LearnConfig, Params, PrivacyBudget};
use serde_json::json;

use super::required;
use crate::output::{row, write_file, Output};
use crate::params::{Eval, Learn};

/// Reads a JSON-lines dataset; blank lines are skipped.
pub fn read_dataset(path: &Path, params: &Params) -> Result<Vec<LabeledExample>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(n, line)| {
            let rec: ExampleRecord =
                serde_json::from_str(line).with_context(|| format!("{}:{}: bad record", path.display(), n + 1))?;
            rec.into_labeled(params)
                .with_context(|| format!("{}:{}: bad example", path.display(), n + 1))
        })
        .collect()
}

pub fn learn(p: Learn) -> Result<Output> {
    let params = Params::new(p.d)?;
    let budget = PrivacyBudget::new(p.epsilon, p.delta)?;
    let cfg = LearnConfig::new(params, p.alpha, p.beta, budget)?.with_sample_constant(p.sample_constant);
    let data = read_dataset(&required(&p.r#in, "in")?, &params)?;
    let mut rng = stream(p.seed, 0);
    let r = if budget.is_pure() {
        learn_pure(&data, &cfg, &mut rng)?
    } else {
        learn_approx(&data, &cfg, &mut rng)?
    };
    if let Some(out) = &p.out {
        write_file(out, &r.hypothesis.to_bytes(&params))?;
    }
    let summary = json!({
        "n": data.len(),
        "required_n": required_sample_size(&cfg),
        "exit": r.exit,
        "noisy_count": r.noisy_count,
        "i_star": r.i_star,
        "prefix_len": r.prefix_len,
        "sample_loss": sample_loss(&params, &r.hypothesis, &data),
    });
    let mut report = json!({
        "command": "learn",
        "params": p,
        "hypothesis": r.hypothesis.to_json(&params),
        "charges": r.charges,
        "total": r.total,
    });
    report["result"] = summary.clone();
    let mut flat = row(&summary);
    flat.extend(row(r.hypothesis.to_json(&params)));
    Ok(Output::new(report, vec![flat]))
}

fn read_hypothesis(path: &Path, d: Option<usize>) -> Result<(Params, Hypothesis)> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        let json: HypothesisJson = serde_json::from_slice(&bytes).context("parsing hypothesis JSON")?;
        let (params, h) = json.into_hypothesis()?;
        if let Some(d) = d.filter(|&d| d != params.d()) {
            bail!("hypothesis has d = {}, but d = {d} was requested", params.d());
        }
        Ok((params, h))
    } else {
        let params = Params::new(d.context("binary hypotheses need --d")?)?;
        Ok((params, Hypothesis::from_bytes(&params, &bytes)?))
    }
}

pub fn eval(p: Eval) -> Result<Output> {
    let (params, h) = read_hypothesis(&required(&p.hypothesis, "hypothesis")?, p.d)?;
    let data = read_dataset(&required(&p.r#in, "in")?, &params)?;
    let rows: Vec<_> = data
        .iter()
        .enumerate()
        .map(|(n, x)| {
            let prediction = h.eval(&params, &x.example);
            row(json!({
                "row": n,
                "i": x.example.i,
                "label": x.label as u8,
                "prediction": prediction as u8,
                "correct": prediction == x.label,
            }))
        })
        .collect();
    let mistakes = rows.iter().filter(|r| r["correct"] == false).count();
    let report = json!({
        "command": "eval",
        "params": { "d": params.d(), "hypothesis": p.hypothesis, "in": p.r#in },
        "hypothesis": h.to_json(&params),
        "examples": data.len(),
        "mistakes": mistakes,
        "loss": if data.is_empty() { 0.0 } else { mistakes as f64 / data.len() as f64 },
    });
    Ok(Output::new(report, rows))
}
