use std::path::Path;
use std::process::{Command, Output};

use owslab::learner::{required_sample_size, sample_loss};
use owslab::ows::{derive_example, ExampleRecord, LabeledExample};
use owslab::rng::stream;
use owslab::{Hypothesis, LearnConfig, Params, PrivacyBudget, SeedKey};
use serde_json::Value;

fn ows_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ows-lab"))
        .args(args)
        .env_remove("OWS_LAB_OUT_DIR")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_dataset(path: &Path, p: &Params, s: &SeedKey, n: u64) -> Vec<LabeledExample> {
    let data: Vec<_> = (0..n)
        .map(|j| LabeledExample::on_sequence(p, s, j * 7 % p.index_count()).unwrap())
        .collect();
    let text: String = data
        .iter()
        .map(|x| serde_json::to_string(&ExampleRecord::from_labeled(x)).unwrap() + "\n")
        .collect();
    std::fs::write(path, text).unwrap();
    data
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(ows_lab(&["--help"]).status.code(), Some(0));
    for args in [
        &["pac", "--bogus"][..],
        &["frobnicate"],
        &["keys", "--d", "5"],
        &["derive", "--d", "49"],
        &["lemmas", "--m-max", "9"],
        &["duel", "--baseline", "oracle"],
        &["pac", "--n", "10", "--auto-n"],
    ] {
        let out = ows_lab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn keys_derive_and_forward_agree() {
    let key = json(&ows_lab(&["keys", "--d", "100", "--seed", "11"]));
    let s_hex = key["key"]["s"].as_str().unwrap().to_owned();
    let p = Params::new(100).unwrap();
    let s = SeedKey::from_hex(&p, &s_hex).unwrap();

    let at = |i: u64| json(&ows_lab(&["derive", "--d", "100", "--s", &s_hex, "--i", &i.to_string()]));
    let x3 = at(3);
    let truth = derive_example(&p, &s, 3).unwrap();
    assert_eq!(x3["example"]["sigma"], truth.sigma.to_hex());
    assert_eq!(x3["example"]["fbit"], truth.fbit as u8);

    let sigma = x3["example"]["sigma"].as_str().unwrap();
    let fwd = json(&ows_lab(&["forward", "--d", "100", "--i", "3", "--j", "9", "--sigma", sigma]));
    assert_eq!(fwd["example"], {
        let mut e = at(9)["example"].clone();
        e.as_object_mut().unwrap().remove("i");
        e["j"] = 9.into();
        e
    });
}

#[test]
fn learn_writes_a_hypothesis_that_eval_reads() {
    let dir = tempfile::tempdir().unwrap();
    let p = Params::new(49).unwrap();
    let s = SeedKey::random(&p, &mut stream(3, 0));
    let data_path = dir.path().join("data.jsonl");
    let data = write_dataset(&data_path, &p, &s, 3000);
    let h_path = dir.path().join("h.bin");
    let args = [
        "learn", "--d", "49", "--epsilon", "1", "--alpha", "0.1", "--beta", "0.1", "--in",
        data_path.to_str().unwrap(), "--out", h_path.to_str().unwrap(),
    ];
    let report = json(&ows_lab(&args));
    let h = Hypothesis::from_bytes(&p, &std::fs::read(&h_path).unwrap()).unwrap();
    assert_eq!(report["hypothesis"], serde_json::to_value(h.to_json(&p)).unwrap());
    assert_eq!(report["total"]["epsilon"], 1.0);
    assert_eq!(report["charges"].as_array().unwrap().len(), 3);

    let eval = json(&ows_lab(&["eval", "--d", "49", "--hypothesis", h_path.to_str().unwrap(), "--in", data_path.to_str().unwrap()]));
    assert_eq!(eval["examples"], 3000);
    assert_eq!(eval["loss"].as_f64().unwrap(), sample_loss(&p, &h, &data));
    assert_eq!(report["result"]["sample_loss"], eval["loss"]);

    // The JSON form carries d itself.
    let h_json = dir.path().join("h.json");
    std::fs::write(&h_json, serde_json::to_vec(&h.to_json(&p)).unwrap()).unwrap();
    let eval2 = json(&ows_lab(&["eval", "--hypothesis", h_json.to_str().unwrap(), "--in", data_path.to_str().unwrap()]));
    assert_eq!(eval2["loss"], eval["loss"]);
    let clash = ows_lab(&["eval", "--d", "64", "--hypothesis", h_json.to_str().unwrap(), "--in", data_path.to_str().unwrap()]);
    assert_eq!(clash.status.code(), Some(2));
}

#[test]
fn malformed_dataset_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    std::fs::write(&path, "{\"i\": 0, \"sigma\": \"zz\", \"label\": 1}\n").unwrap();
    let out = ows_lab(&["learn", "--d", "49", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.jsonl:1"));
}

const PAC_SMALL: [&str; 9] = ["pac", "--d", "64", "--trials", "4", "--mc-samples", "200", "--seed", "5"];

#[test]
fn pac_auto_n_uses_the_sample_size_rule() {
    let report = json(&ows_lab(&[&PAC_SMALL[..], &["--auto-n"]].concat()));
    let cfg = LearnConfig::new(Params::new(64).unwrap(), 0.1, 0.1, PrivacyBudget::pure(1.0).unwrap()).unwrap();
    assert_eq!(report["params"]["n"], required_sample_size(&cfg));
    assert_eq!(report["experiment"], "pac");
    assert_eq!(report["trials"], 4);
    for key in ["successes", "ci_low", "ci_high", "seed"] {
        assert!(report.get(key).is_some(), "{key}");
    }
    let explicit = json(&ows_lab(&[&PAC_SMALL[..], &["--n", "500"]].concat()));
    assert_eq!(explicit["params"]["n"], 500);
}

#[test]
fn reports_are_byte_identical_across_runs_and_job_counts() {
    let one = ows_lab(&[&PAC_SMALL[..], &["--n", "2000", "--jobs", "1"]].concat());
    let two = ows_lab(&[&PAC_SMALL[..], &["--n", "2000", "--jobs", "3"]].concat());
    let again = ows_lab(&[&PAC_SMALL[..], &["--n", "2000"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, two.stdout);
    assert_eq!(one.stdout, again.stdout);

    let csv1 = ows_lab(&["duel", "--d", "256", "--t", "200", "--keys", "6", "--baseline", "random", "--format", "csv", "--jobs", "1"]);
    let csv2 = ows_lab(&["duel", "--d", "256", "--t", "200", "--keys", "6", "--baseline", "random", "--format", "csv", "--jobs", "4"]);
    assert!(csv1.status.success());
    assert_eq!(csv1.stdout, csv2.stdout);
}

#[test]
fn csv_mirror_has_one_row_per_trial() {
    let out = ows_lab(&[&PAC_SMALL[..], &["--n", "2000", "--format", "csv"]].concat());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("trial,n,sample_loss,population_loss_estimate"));
    for (t, line) in lines[1..].iter().enumerate() {
        assert!(line.starts_with(&format!("{t},2000,")), "{line}");
    }
}

#[test]
fn config_precedence_is_flags_then_table_then_top_level() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lab.toml");
    std::fs::write(&cfg, "seed = 9\nd = 64\n\n[pac]\ntrials = 2\nmc_samples = 100\nn = 300\nseed = 8\n").unwrap();
    let c = cfg.to_str().unwrap();

    let from_table = json(&ows_lab(&["pac", "--config", c]));
    assert_eq!(from_table["params"]["trials"], 2);
    assert_eq!(from_table["params"]["d"], 64);
    assert_eq!(from_table["seed"], 8);
    assert_eq!(from_table["params"]["alpha"], 0.1);

    let flagged = json(&ows_lab(&["pac", "--config", c, "--seed", "7", "--trials", "3"]));
    assert_eq!(flagged["seed"], 7);
    assert_eq!(flagged["trials"], 3);

    // Top-level keys reach commands without a table of their own.
    let keys = json(&ows_lab(&["keys", "--config", c]));
    assert_eq!(keys["params"], serde_json::json!({ "d": 64, "seed": 9 }));

    std::fs::write(&cfg, "[pac]\ntrails = 2\n").unwrap();
    let out = ows_lab(&["pac", "--config", c]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trails"));
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ows-lab"))
        .args(["mech-audit", "--output", "audit.json"])
        .env("OWS_LAB_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_slice(&std::fs::read(dir.path().join("audit.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["audits"].as_array().unwrap().len(), 3);
}

#[test]
fn lemmas_pass_with_exit_zero() {
    let report = json(&ows_lab(&["lemmas", "--m-max", "8"]));
    assert_eq!(report["passed"], true);
    assert_eq!(report["separation"]["cases"].as_array().unwrap().len(), 7);
    assert_eq!(report["generation"].as_array().unwrap().len(), 10);
}

#[test]
fn mech_audit_table() {
    let out = ows_lab(&["mech-audit", "--epsilons", "0.5,2", "--table", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 7);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn failed_calibration_exits_one() {
    let args = ["calibrate", "--constants", "0.01", "--dims", "64", "--trials", "3", "--mc-samples", "100", "--slack", "0"];
    let out = ows_lab(&args);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["chosen"], Value::Null);
    assert_eq!(report["rows"][0]["passed"], false);
}

#[test]
fn duel_and_advantage_baselines() {
    let omni = json(&ows_lab(&["duel", "--d", "256", "--t", "300", "--keys", "4", "--baseline", "omniscient"]));
    assert_eq!(omni["mistake_rate"], 0.0);
    assert_eq!(omni["successes"], 4);
    let fwd = json(&ows_lab(&["duel", "--d", "256", "--t", "300", "--keys", "4", "--baseline", "forward"]));
    assert_eq!(fwd["successes"], 0);
    assert!(fwd["mistake_rate"].as_f64().unwrap() > 0.3);

    let adv = json(&ows_lab(&["advantage", "--d", "256", "--trials", "50", "--baseline", "omniscient"]));
    assert_eq!(adv["successes"], 50);
    assert_eq!(adv["params"]["t"], Params::new(256).unwrap().top_index() - 33);
}
