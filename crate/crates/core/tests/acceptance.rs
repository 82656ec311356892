//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use owslab::arena::lemmas::{separates, verify_generation_bound, verify_separation_lemma};
use owslab::arena::online::ForwardPredictor;
use owslab::arena::pac::{batch_threshold, run_pac_batch};
use owslab::arena::report::{binomial_band, Z99};
use owslab::arena::{prediction_advantage, reverse_stream, run_online_game, Baseline};
use owslab::dp::{exp_mech_interior_point, SortedIntDataset, TwoSidedGeometric};
use owslab::learner::{learn_approx, learn_pure, required_sample_size, DEFAULT_SAMPLE_CONSTANT};
use owslab::ows::{compute_forward, derive_example, CoPath, LabeledExample};
use owslab::rng::stream;
use owslab::{Example, Hypothesis, LearnConfig, Params, PrivacyBudget, SeedKey};
use rand::Rng;
use rayon::prelude::*;

const SEED: u64 = 20_240_917;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

/// 1. Exhaustive forward consistency for k = 2..=5.
fn forward_consistency() -> Verdict {
    let (mut checks, mut violations) = (0u64, 0u64);
    for k in 2..=5 {
        let p = Params::for_k(k).unwrap();
        for sv in 0..p.index_count() {
            let s = SeedKey::new(&p, sv).unwrap();
            let all: Vec<_> = (0..p.index_count()).map(|i| derive_example(&p, &s, i).unwrap()).collect();
            for i in 0..p.index_count() {
                for j in i + 1..p.index_count() {
                    let got = compute_forward(&p, j, i, &all[i as usize].sigma).unwrap();
                    checks += 1;
                    violations += (got != all[j as usize]) as u64;
                }
            }
        }
    }
    verdict(violations == 0, format!("{violations} violations in {checks} (s, i < j) triples, k = 2..=5"))
}

/// 2. Interior point on R = 2^20 with n = ceil(4 ln(R / beta)) + 1.
fn interior_point() -> Verdict {
    let (r, eps, beta, runs) = (1u64 << 20, 1.0, 0.05, 10_000u64);
    let n = (4.0 * (r as f64 / beta).ln()).ceil() as usize + 1;
    let bad: u64 = (0..runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = stream(SEED, 200_000 + run);
            let values = (0..n).map(|_| rng.random_range(1..=r)).collect();
            let data = SortedIntDataset::from_unsorted(values, r).unwrap();
            let out = exp_mech_interior_point(&data, eps, &mut rng).unwrap();
            !data.is_interior(out) as u64
        })
        .sum();
    let limit = beta * runs as f64 + 3.0 * (beta * (1.0 - beta) * runs as f64).sqrt();
    verdict(bad as f64 <= limit, format!("n = {n}: {bad} non-interior of {runs}, limit {limit:.2}"))
}

/// 3. Exact shift-ratio audit of the two-sided geometric.
fn dp_ratio() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for eps in [0.1, 1.0, 5.0] {
        let a = TwoSidedGeometric::new(eps).unwrap().audit_ratio(50);
        ok &= a.passed && a.max_exponent_window <= 1 && a.max_exponent_tail <= 1;
        parts.push(format!("eps {eps}: max exponent {} (window) {} (tail)", a.max_exponent_window, a.max_exponent_tail));
    }
    verdict(ok, parts.join("; "))
}

fn pac_config(d: usize) -> LearnConfig {
    LearnConfig::new(Params::new(d).unwrap(), 0.1, 0.1, PrivacyBudget::pure(1.0).unwrap()).unwrap()
}

fn pac_at(d: usize) -> (u64, u64, f64) {
    let cfg = pac_config(d);
    let n = required_sample_size(&cfg);
    let batch = run_pac_batch(&cfg, n as usize, 200, 100, 2000, SEED + d as u64).unwrap();
    let ok = batch.iter().filter(|r| r.success).count() as u64;
    (n, ok, batch_threshold(200, cfg.beta, 10.0))
}

/// 4. End-to-end PAC at d = 256.
fn pac_256() -> Verdict {
    let (n, ok, need) = pac_at(256);
    verdict(ok as f64 >= need, format!("C = {DEFAULT_SAMPLE_CONSTANT}, n = {n}: {ok}/200 successes, need {need}"))
}

/// 5. The same constant at d = 64, 256, 1024.
fn calibration() -> Verdict {
    let mut parts = Vec::new();
    let mut all = true;
    for d in [64, 256, 1024] {
        let (n, ok, need) = pac_at(d);
        all &= ok as f64 >= need;
        parts.push(format!("d {d}: n = {n}, {ok}/200"));
    }
    verdict(all, format!("C = {DEFAULT_SAMPLE_CONSTANT}; {}; need >= 170 each", parts.join("; ")))
}

/// 6. Reverse-stream game against every baseline.
fn online_failure() -> Verdict {
    let p = Params::new(1024).unwrap();
    let (keys, t) = (50u64, 2000u64);
    let names: Vec<Baseline> = Baseline::EFFICIENT.into_iter().chain([Baseline::Omniscient]).collect();
    // Per key: best-constant mistakes, then mistakes of each learner.
    let per_key: Vec<(u64, Vec<u64>)> = (0..keys)
        .into_par_iter()
        .map(|key| {
            let mut rng = stream(SEED, 600_000 + key);
            let s = SeedKey::random(&p, &mut rng);
            let xs = reverse_stream(&s, &p, t).unwrap();
            let mut best = 0;
            let counts = names
                .iter()
                .map(|b| {
                    let mut learner = b.build(p, s, rng.random());
                    let rec = run_online_game(&mut learner, &xs, &p, &s, false).unwrap();
                    best = rec.best_constant_mistakes() as u64;
                    rec.mistakes as u64
                })
                .collect();
            (best, counts)
        })
        .collect();
    let rounds = (keys * t) as f64;
    let best_rate = per_key.iter().map(|k| k.0).sum::<u64>() as f64 / rounds;
    let mut ok = true;
    let mut parts = vec![format!("best constant {best_rate:.4}")];
    for (j, b) in names.iter().enumerate() {
        let rate = per_key.iter().map(|k| k.1[j]).sum::<u64>() as f64 / rounds;
        ok &= if *b == Baseline::Omniscient { rate == 0.0 } else { rate >= best_rate - 0.02 };
        parts.push(format!("{} {rate:.4}", b.name()));
    }
    verdict(ok, parts.join(", "))
}

/// 7. Forward prediction one step below a 32-example suffix.
fn advantage() -> Verdict {
    let p = Params::new(1024).unwrap();
    let trials = 10_000;
    let t = p.index_count() - 33;
    let r = prediction_advantage(|_, _| ForwardPredictor::new(p), t, trials, &p, &mut stream(SEED, 7)).unwrap();
    let (lo, hi) = binomial_band(0.5, trials, Z99);
    verdict(
        (lo..=hi).contains(&r.advantage),
        format!("advantage {:.4} over {trials} trials, 99% band [{lo:.4}, {hi:.4}]", r.advantage),
    )
}

/// 8. Separation lemma for m <= 8.
fn separation() -> Verdict {
    let r = verify_separation_lemma(8).unwrap();
    let rechecked = r.cases.iter().all(|c| separates(c.m, &c.witness));
    let minima: Vec<String> = r.cases.iter().map(|c| format!("{}:{}", c.m, c.minimum_size)).collect();
    verdict(
        r.passed && rechecked,
        format!("minimum separating sizes (m:n) {}; every size below log2(m) + 1 refuted", minima.join(" ")),
    )
}

/// 9. Generation bound for universes up to 10 and n <= 3.
fn generation() -> Verdict {
    let mut ok = true;
    let mut worst = [0u64; 4];
    for u in 1..=10 {
        let r = verify_generation_bound(u, 3, &mut stream(SEED, 900 + u as u64)).unwrap();
        ok &= r.passed && r.cases.iter().all(|c| c.closed_bound_holds);
        for c in &r.cases {
            worst[c.n] = worst[c.n].max(c.max_count);
        }
    }
    verdict(ok, format!("largest generated counts for n = 0..=3: {worst:?} against bounds [2, 4, 16, 256]"))
}

/// 10. Fuzz both learners on arbitrary datasets.
fn fuzz() -> Verdict {
    let runs = 10_000u64;
    let dims = [9usize, 16, 36, 64, 100, 256];
    let failures: u64 = (0..runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = stream(SEED, 1_000_000 + run);
            let p = Params::new(dims[rng.random_range(0..dims.len())]).unwrap();
            let s = SeedKey::random(&p, &mut rng);
            let n = rng.random_range(0..200);
            let on_frac: f64 = rng.random();
            let data: Vec<_> = (0..n)
                .map(|_| {
                    let x = if rng.random_bool(on_frac) {
                        LabeledExample::on_sequence(&p, &s, rng.random_range(0..p.index_count())).unwrap().example
                    } else {
                        Example::random(&p, &mut rng)
                    };
                    LabeledExample::new(x, rng.random())
                })
                .collect();
            let eps = rng.random_range(0.01..10.0);
            let delta = 10f64.powf(-rng.random_range(1.0..12.0));
            let alpha = rng.random_range(0.01..0.99);
            let beta = rng.random_range(0.01..0.99);
            let attempt = catch_unwind(AssertUnwindSafe(|| {
                let pure = LearnConfig::new(p, alpha, beta, PrivacyBudget::pure(eps).unwrap()).unwrap();
                let approx = LearnConfig {
                    budget: PrivacyBudget::new(eps, delta).unwrap(),
                    ..pure
                };
                let a = learn_pure(&data, &pure, &mut rng).ok()?;
                let b = learn_approx(&data, &approx, &mut rng).ok()?;
                let well_formed = |h: &Hypothesis| match h {
                    Hypothesis::AllZero => true,
                    Hypothesis::Threshold { i_star, sigma_star, .. } => {
                        *i_star < p.index_count()
                            && CoPath::parse(&p, *i_star, sigma_star).is_ok_and(|c| c.serialize(&p) == *sigma_star)
                    }
                };
                let exact = a.total == pure.budget && b.total == approx.budget;
                (exact && well_formed(&a.hypothesis) && well_formed(&b.hypothesis)).then_some(())
            }));
            matches!(attempt, Ok(None) | Err(_)) as u64
        })
        .sum();
    verdict(failures == 0, format!("{failures} failures in {runs} datasets x 2 learners"))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 10] = [
        ("forward consistency", forward_consistency),
        ("interior point success", interior_point),
        ("geometric DP ratio", dp_ratio),
        ("end-to-end PAC at d = 256", pac_256),
        ("sample-size calibration", calibration),
        ("online failure on reverse streams", online_failure),
        ("forward prediction advantage", advantage),
        ("separation lemma", separation),
        ("generation bound", generation),
        ("totality and budget fuzz", fuzz),
    ];
    let mut failed = 0;
    for (id, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        failed += !v.passed as usize;
        println!(
            "criterion {:>2} {} {name}: {} [{:.1}s]",
            id + 1,
            if v.passed { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
