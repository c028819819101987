//! Acceptance criteria, one PASS/FAIL line each. Runs with `harness = false`
//! so the verdict lines always reach stdout; exits nonzero if any fails.

use std::collections::HashMap;
use std::f64::consts::LN_2;
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use privgraph::datagen::{synth_graph, SynthParams};
use privgraph::eval::{eval_seed, evaluate, ClassifierKind, EvalConfig, Metric, Task};
use privgraph::gradsuite::{registered_checks, run_checks, TOLERANCE};
use privgraph::models::{
    attacker_loss, attr_loss, link_loss, objective, Attacker, Discriminator, LinkLoss, ModelState,
    Variant,
};
use privgraph::numkit::{bce_with_logits, derive_seed, softmax_cross_entropy, DenseMatrix, Rng};
use privgraph::training::{prepare, train, TrainConfig};

const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
const LAMBDAS: [f64; 4] = [0.0, 1.0, 10.0, 100.0];
const DPRIMES: [usize; 4] = [2, 4, 8, 16];

#[derive(Clone, Debug)]
struct RunSummary {
    privacy_f1: f64,
    utility_f1: f64,
    link_acc: f64,
    /// Per-dimension mean and population std of the code Z′.
    code_mean: Vec<f64>,
    code_std: Vec<f64>,
    elapsed: Duration,
}

#[derive(Default)]
struct Runs {
    cache: HashMap<String, RunSummary>,
}

impl Runs {
    fn get(&mut self, variant: Variant, lambda: f64, d_prime: usize, seed: u64) -> RunSummary {
        let key = format!("{variant}/{lambda}/{d_prime}/{seed}");
        if let Some(r) = self.cache.get(&key) {
            return r.clone();
        }
        let started = Instant::now();
        let params = SynthParams {
            seed: derive_seed(seed, "synth"),
            ..SynthParams::default()
        };
        let (g, schema) = synth_graph(&params).expect("synth");
        let cfg = TrainConfig {
            variant,
            lambda,
            d_prime,
            seed,
            ..TrainConfig::default()
        };
        let result = train(&g, &schema, &cfg).expect("train");
        let eval = EvalConfig::default();
        let method = variant.name();
        let report = evaluate(
            method,
            &result.z,
            &g,
            &schema,
            result.edge_split.as_ref(),
            &eval,
            eval_seed(&cfg),
        )
        .expect("evaluate");
        let mlp = ClassifierKind::Mlp;
        let value = |task: &Task, metric| report.find(method, task, mlp, metric).unwrap().mean;
        let utilities: Vec<f64> = schema
            .utilities()
            .map(|u| value(&Task::Utility(u.name.clone()), Metric::MacroF1))
            .collect();
        let (code_mean, code_std) = column_stats(&result.code);
        let summary = RunSummary {
            privacy_f1: value(&Task::Privacy, Metric::MacroF1),
            utility_f1: utilities.iter().sum::<f64>() / utilities.len() as f64,
            link_acc: value(&Task::Link, Metric::Accuracy),
            code_mean,
            code_std,
            elapsed: started.elapsed(),
        };
        eprintln!(
            "  run {key}: privacy {:.3} utility {:.3} link {:.3} ({:.1}s)",
            summary.privacy_f1,
            summary.utility_f1,
            summary.link_acc,
            summary.elapsed.as_secs_f64()
        );
        self.cache.insert(key, summary.clone());
        summary
    }

    fn mean(
        &mut self,
        variant: Variant,
        lambda: f64,
        d_prime: usize,
        f: impl Fn(&RunSummary) -> f64,
    ) -> f64 {
        let total: f64 = SEEDS
            .iter()
            .map(|&s| f(&self.get(variant, lambda, d_prime, s)))
            .sum();
        total / SEEDS.len() as f64
    }
}

fn column_stats(m: &DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.rows() as f64;
    (0..m.cols())
        .map(|j| {
            let mean = (0..m.rows()).map(|i| m.get(i, j)).sum::<f64>() / n;
            let var = (0..m.rows()).map(|i| (m.get(i, j) - mean).powi(2)).sum::<f64>() / n;
            (mean, var.sqrt())
        })
        .unzip()
}

/// Non-increasing (or non-decreasing with `rising`) with at most one
/// adjacent pair moving the wrong way, by no more than `slack`.
fn monotone_with_allowance(values: &[f64], rising: bool, slack: f64) -> bool {
    let wrong: Vec<f64> = values
        .windows(2)
        .map(|w| if rising { w[0] - w[1] } else { w[1] - w[0] })
        .filter(|&d| d > 0.0)
        .collect();
    wrong.is_empty() || (wrong.len() == 1 && wrong[0] <= slack)
}

struct Verdicts {
    failed: usize,
}

impl Verdicts {
    fn record(&mut self, id: u32, name: &str, passed: bool, detail: String) {
        let tag = if passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id} ({name}): {detail}");
        if !passed {
            self.failed += 1;
        }
    }
}

fn default_dims() -> TrainConfig {
    TrainConfig::default()
}

fn gradient_suite(v: &mut Verdicts) {
    let started = Instant::now();
    let outcomes = run_checks(&registered_checks().unwrap(), TOLERANCE).unwrap();
    let elapsed = started.elapsed();
    let worst = outcomes
        .iter()
        .map(|o| o.result.max_rel_error)
        .fold(0.0, f64::max);
    let failing: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.name.as_str())
        .collect();
    v.record(
        1,
        "gradient suite",
        failing.is_empty() && elapsed < Duration::from_secs(60),
        format!(
            "{} checks, worst rel err {worst:.2e} (tol {TOLERANCE:e}), failing {failing:?}, {:.2}s",
            outcomes.len(),
            elapsed.as_secs_f64()
        ),
    );
}

fn analytic_losses(v: &mut Verdicts) {
    const TOL: f64 = 1e-9;
    let mut checks: Vec<(&str, f64, f64)> = Vec::new();
    let scalar = |x: f64| DenseMatrix::new(1, 1, vec![x]).unwrap();

    checks.push(("bce logit 0 target 1", bce_with_logits(&scalar(0.0), &scalar(1.0), 1.0).unwrap().0, LN_2));
    checks.push(("bce logit 0 target 0", bce_with_logits(&scalar(0.0), &scalar(0.0), 1.0).unwrap().0, LN_2));
    checks.push((
        "bce logit 2 target 1",
        bce_with_logits(&scalar(2.0), &scalar(1.0), 1.0).unwrap().0,
        (1.0 + (-2.0f64).exp()).ln(),
    ));
    let k = 7;
    let mut onehot = DenseMatrix::zeros(3, k);
    for i in 0..3 {
        onehot.set(i, (2 * i) % k, 1.0);
    }
    checks.push((
        "uniform softmax over K",
        softmax_cross_entropy(&DenseMatrix::zeros(3, k), &onehot, &[0, 1, 2]).unwrap().0,
        (k as f64).ln(),
    ));

    let (g, schema) = synth_graph(&SynthParams {
        n: 24,
        p_in: 0.4,
        p_out: 0.05,
        ..SynthParams::default()
    })
    .unwrap();
    let cfg = TrainConfig {
        variant: Variant::Appge,
        d: 6,
        d_prime: 6,
        hidden: 8,
        edge_holdout: 0.0,
        ..default_dims()
    };
    let p = prepare(&g, &schema, &cfg).unwrap();
    let n = p.inputs.node_count();
    let links = &p.inputs.links;
    let (n2, nnz) = ((n * n) as f64, links.nnz() as f64);
    checks.push((
        "link loss at Zin = 0",
        link_loss(&DenseMatrix::zeros(n, 4), links, LinkLoss::Exact, &mut Rng::new(0)).unwrap().0,
        LN_2 * (links.pos_weight() * nnz + (n2 - nnz)) / n2,
    ));
    let mu = p.inputs.utilities[0].num_classes();
    checks.push((
        "attribute head Wc = 0",
        attr_loss(&DenseMatrix::zeros(n, 4), &DenseMatrix::zeros(4, mu), &p.inputs.utilities[0]).unwrap().0,
        (mu as f64).ln(),
    ));
    let zero_attacker = Attacker {
        w: DenseMatrix::zeros(4, 2),
        b: DenseMatrix::zeros(1, 2),
        standardize: false,
    };
    checks.push((
        "attacker Wa = 0, two classes",
        attacker_loss(&zero_attacker, &DenseMatrix::zeros(n, 4), &p.inputs.privacy).unwrap().0,
        LN_2,
    ));

    let mut disc = Discriminator::init(1, &mut Rng::new(0)).unwrap();
    for m in [&mut disc.w1, &mut disc.b1, &mut disc.w2, &mut disc.b2] {
        *m = DenseMatrix::zeros(m.rows(), m.cols());
    }
    let batch = DenseMatrix::new(3, 1, vec![0.4, -1.0, 2.0]).unwrap();
    checks.push(("discriminator at D = 0.5", disc.disc_loss(&batch, &batch).unwrap().0, 2.0 * LN_2));
    checks.push(("generator at D = 0.5", disc.gen_fool_loss(&batch).unwrap().0, LN_2));
    // One live unit: real input 1 gives logit ln 9, fake input −1 gives −ln 9.
    let ln9 = 9f64.ln();
    disc.w1.set(0, 0, 1.0);
    disc.w2.set(0, 0, 2.0 * ln9);
    disc.b2.set(0, 0, -ln9);
    let real = DenseMatrix::new(2, 1, vec![1.0, 1.0]).unwrap();
    let fake = DenseMatrix::new(2, 1, vec![-1.0, -1.0]).unwrap();
    checks.push((
        "discriminator at D(s) = 0.9, D(z') = 0.1",
        disc.disc_loss(&real, &fake).unwrap().0,
        -2.0 * 0.9f64.ln(),
    ));

    checks.push(("obfuscator arithmetic", objective::obf_loss(1.0, 0.5, 10.0), -4.0));
    let state = ModelState::init(Variant::Appge, &p.dims, &mut Rng::new(5)).unwrap();
    let (losses, grads) =
        objective::obfuscator(&state, &p.inputs, 0.0, LinkLoss::Exact, &mut Rng::new(1)).unwrap();
    checks.push(("λ = 0 gives L_obf = L_recon", losses.obf, losses.recon));
    let gae = ModelState::from_parts(
        Variant::Gae,
        state.encoder.clone(),
        None,
        state.heads.clone(),
        None,
        None,
    )
    .unwrap();
    let (gae_losses, gae_grads) =
        objective::obfuscator(&gae, &p.inputs, 0.0, LinkLoss::Exact, &mut Rng::new(1)).unwrap();
    checks.push(("λ = 0 recon equals the plain autoencoder", losses.recon, gae_losses.recon));
    let grad_gap = grads
        .iter()
        .zip(&gae_grads)
        .flat_map(|(a, b)| a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    checks.push(("λ = 0 gradients equal the plain autoencoder", grad_gap, 0.0));

    let bad: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| !((got - want).abs() <= TOL))
        .map(|(name, got, want)| format!("{name}: {got} vs {want}"))
        .collect();
    v.record(
        2,
        "analytic loss values",
        bad.is_empty(),
        format!("{} values at tol {TOL:e}, mismatches {bad:?}", checks.len()),
    );
}

fn leakage_ordering(v: &mut Verdicts, runs: &mut Runs) {
    let d = default_dims().d_prime;
    let started = Instant::now();
    let mut stats = HashMap::new();
    for variant in [Variant::Gae, Variant::GaeRm, Variant::Apge] {
        let privacy = runs.mean(variant, 1.0, d, |r| r.privacy_f1);
        let utility = runs.mean(variant, 1.0, d, |r| r.utility_f1);
        let link = runs.mean(variant, 1.0, d, |r| r.link_acc);
        stats.insert(variant, (privacy, utility, link));
    }
    let compute: Duration = [Variant::Gae, Variant::GaeRm, Variant::Apge]
        .iter()
        .flat_map(|&var| SEEDS.iter().map(move |&s| (var, s)))
        .map(|(var, s)| runs.get(var, 1.0, d, s).elapsed)
        .sum();
    let (gp, gu, gl) = stats[&Variant::Gae];
    let (rp, _, _) = stats[&Variant::GaeRm];
    let (ap, au, al) = stats[&Variant::Apge];
    let conditions = [
        ("GAE >= GAE_RM", gp >= rp),
        ("GAE_RM >= APGE", rp >= ap),
        ("GAE >= 0.80", gp >= 0.80),
        ("GAE - APGE >= 0.15", gp - ap >= 0.15),
        ("APGE link >= GAE link - 0.06", al >= gl - 0.06),
        ("APGE utility >= GAE utility - 0.10", au >= gu - 0.10),
        ("runtime < 15 min", compute < Duration::from_secs(15 * 60)),
    ];
    let failed: Vec<&str> = conditions.iter().filter(|c| !c.1).map(|c| c.0).collect();
    v.record(
        3,
        "planted-leakage ordering",
        failed.is_empty(),
        format!(
            "privacy F1 GAE {gp:.3} GAE_RM {rp:.3} APGE {ap:.3}; link ACC GAE {gl:.3} APGE {al:.3}; \
             utility F1 GAE {gu:.3} APGE {au:.3}; {:.0}s compute ({:.0}s wall); unmet {failed:?}",
            compute.as_secs_f64(),
            started.elapsed().as_secs_f64()
        ),
    );
}

fn lambda_trend(v: &mut Verdicts, runs: &mut Runs) {
    let d = default_dims().d_prime;
    let privacy: Vec<f64> = LAMBDAS
        .iter()
        .map(|&l| runs.mean(Variant::Apge, l, d, |r| r.privacy_f1))
        .collect();
    v.record(
        4,
        "lambda trend",
        monotone_with_allowance(&privacy, false, 0.02),
        format!("attack F1 over λ {LAMBDAS:?}: {}", fmt(&privacy)),
    );
}

fn dprime_trend(v: &mut Verdicts, runs: &mut Runs) {
    let utility: Vec<f64> = DPRIMES
        .iter()
        .map(|&d| runs.mean(Variant::Apge, 1.0, d, |r| r.utility_f1))
        .collect();
    let privacy: Vec<f64> = DPRIMES
        .iter()
        .map(|&d| runs.mean(Variant::Apge, 1.0, d, |r| r.privacy_f1))
        .collect();
    v.record(
        5,
        "d' trend",
        monotone_with_allowance(&utility, true, 0.02) && monotone_with_allowance(&privacy, true, 0.02),
        format!(
            "over d' {DPRIMES:?}: utility F1 {}, attack F1 {}",
            fmt(&utility),
            fmt(&privacy)
        ),
    );
}

fn prior_matching(v: &mut Verdicts, runs: &mut Runs) {
    let d = default_dims().d_prime;
    let mut ok = true;
    let mut parts = Vec::new();
    for variant in [Variant::Apdge, Variant::Apge] {
        let (mut mean_range, mut std_range) = ((f64::MAX, f64::MIN), (f64::MAX, f64::MIN));
        for &s in &SEEDS {
            let r = runs.get(variant, 1.0, d, s);
            for (&m, &sd) in r.code_mean.iter().zip(&r.code_std) {
                ok &= (-0.3..=0.3).contains(&m) && (0.5..=1.5).contains(&sd);
                mean_range = (mean_range.0.min(m), mean_range.1.max(m));
                std_range = (std_range.0.min(sd), std_range.1.max(sd));
            }
        }
        parts.push(format!(
            "{variant} mean [{:.3}, {:.3}] std [{:.3}, {:.3}]",
            mean_range.0, mean_range.1, std_range.0, std_range.1
        ));
    }
    v.record(
        6,
        "prior matching",
        ok,
        format!("{} (need mean in [-0.3, 0.3], std in [0.5, 1.5])", parts.join("; ")),
    );
}

fn expansion_ablation(v: &mut Verdicts, runs: &mut Runs) {
    let d = default_dims().d_prime;
    let link = runs.mean(Variant::Apge, 1.0, d, |r| r.link_acc);
    let link_noexp = runs.mean(Variant::ApgeNoExp, 1.0, d, |r| r.link_acc);
    let att = runs.mean(Variant::Apge, 1.0, d, |r| r.privacy_f1);
    let att_noexp = runs.mean(Variant::ApgeNoExp, 1.0, d, |r| r.privacy_f1);
    v.record(
        7,
        "expansion ablation",
        link - link_noexp >= 0.03 && (att - att_noexp).abs() < 0.05,
        format!(
            "link ACC APGE {link:.3} vs NOEXP {link_noexp:.3} (gap {:.3}, need >= 0.03); \
             attack F1 {att:.3} vs {att_noexp:.3} (diff {:.3}, need < 0.05)",
            link - link_noexp,
            (att - att_noexp).abs()
        ),
    );
}

fn determinism(v: &mut Verdicts) {
    let tmp = tempfile::TempDir::new().unwrap();
    let config = tmp.path().join("config.json");
    fs::write(&config, r#"{"seed": 17, "model": {"variant": "APGE"}}"#).unwrap();
    let mut outputs = Vec::new();
    let mut ok = true;
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        for cmd in ["train", "attack"] {
            let status = Command::new(env!("CARGO_BIN_EXE_privgraph"))
                .arg(cmd)
                .arg("--config")
                .arg(&config)
                .arg("--out")
                .arg(&out)
                .arg("--deterministic")
                .output()
                .unwrap();
            ok &= status.status.success();
        }
        outputs.push(
            ["embeddings.csv", "report.csv"].map(|f| fs::read(out.join(f)).unwrap_or_default()),
        );
    }
    let same = outputs[0] == outputs[1] && outputs[0].iter().all(|b| !b.is_empty());
    v.record(
        8,
        "determinism",
        ok && same,
        format!(
            "two train+attack runs: embeddings.csv {} bytes, report.csv {} bytes, identical: {same}",
            outputs[0][0].len(),
            outputs[0][1].len()
        ),
    );
}

fn fmt(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|x| format!("{x:.3}")).collect();
    format!("[{}]", parts.join(", "))
}

fn main() {
    // `cargo test -- --list` and filtered runs expect a quick exit.
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        println!("criteria: test");
        return;
    }
    let started = Instant::now();
    let mut v = Verdicts { failed: 0 };
    let mut runs = Runs::default();
    gradient_suite(&mut v);
    analytic_losses(&mut v);
    determinism(&mut v);
    leakage_ordering(&mut v, &mut runs);
    lambda_trend(&mut v, &mut runs);
    dprime_trend(&mut v, &mut runs);
    prior_matching(&mut v, &mut runs);
    expansion_ablation(&mut v, &mut runs);
    println!(
        "SKIP criterion 9 (full-scale reproduction): needs the original social-network files, \
         which are not bundled; see README for running it on supplied data"
    );
    println!(
        "acceptance: {} of 8 criteria failed, {:.0}s",
        v.failed,
        started.elapsed().as_secs_f64()
    );
    if v.failed > 0 {
        std::process::exit(1);
    }
}
