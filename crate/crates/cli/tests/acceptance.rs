//! Acceptance checks. Each criterion prints one `[PASS]` or `[FAIL]` line;
//! the test fails if any criterion does.

mod common;
#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use gapscope_core::metrics::licensing_interaction;
use gapscope_core::ngram::{NGramModel, TrainConfig, EOS, UNK};
use gapscope_core::scoring::{score_suite, BuiltinScorer, ExternalConfig, ExternalScorer, Scorer};
use gapscope_core::stats::simulate::{
    balanced_2x2, balanced_2x2_with, null_calibration, SyntheticSpec, CELL_CODES,
};
use gapscope_core::stats::{fit_mixed_reml, within_item_ci};
use gapscope_core::suite::{bundled, TestSuite};
use gapscope_core::Exec;
use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Keyed by (filler present, gap present).
fn table(v: [f64; 4]) -> HashMap<(bool, bool), f64> {
    HashMap::from([
        ((false, false), v[0]),
        ((true, false), v[1]),
        ((false, true), v[2]),
        ((true, true), v[3]),
    ])
}

fn metric_correctness() -> Result<(), String> {
    let li = |v| licensing_interaction(&table(v)).map_err(|e| e.to_string());
    let constructed = li([10.0, 14.0, 12.0, 8.0])?;
    ensure(constructed == 8.0, || format!("constructed table gave {constructed}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    // multiples of 1/64 keep every sum exact
    let draw = |rng: &mut ChaCha8Rng| rng.random_range(-6400i32..6400) as f64 / 64.0;
    for _ in 0..1000 {
        let v = [draw(&mut rng), draw(&mut rng), draw(&mut rng), draw(&mut rng)];
        let c = draw(&mut rng);
        let base = li(v)?;
        let shifted = li(v.map(|x| x + c))?;
        ensure((base - shifted).abs() <= 1e-12, || format!("translation: {v:?} + {c}"))?;
        let swapped = li([v[2], v[3], v[0], v[1]])?;
        ensure((base + swapped).abs() <= 1e-12, || format!("antisymmetry: {v:?}"))?;
    }
    Ok(())
}

fn regression_consistency() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..100 {
        let spec = SyntheticSpec {
            n_items: rng.random_range(3..40),
            beta: [rng.random_range(-20.0..20.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)],
            sigma_item: rng.random_range(0.0..3.0),
            sigma_resid: rng.random_range(0.1..3.0),
        };
        let (design, y) = balanced_2x2_with(&spec, &mut rng);
        let fit = fit_mixed_reml(&design, &y).map_err(|e| e.to_string())?;
        let mut total = 0.0;
        for row in y.as_slice().chunks(4) {
            let cells: HashMap<(bool, bool), f64> = CELL_CODES
                .iter()
                .zip(row)
                .map(|(&(f, g), &v)| ((f > 0.0, g > 0.0), v))
                .collect();
            total += licensing_interaction(&cells).map_err(|e| e.to_string())?;
        }
        let mean = total / spec.n_items as f64;
        let coef = fit.coefficient("filler:gap").ok_or("no filler:gap column")?.estimate;
        ensure((-4.0 * coef - mean).abs() < 1e-9, || {
            format!("trial {trial}: -4 x {coef} vs {mean}")
        })?;
    }
    Ok(())
}

fn reml_oracle() -> Result<(), String> {
    let spec = |sigma_item| SyntheticSpec {
        n_items: 200,
        beta: [10.0, 1.0, -1.0, 2.0],
        sigma_item,
        sigma_resid: 0.5,
    };
    let (design, y) = balanced_2x2(&spec(1.0), 2024);
    let fit = fit_mixed_reml(&design, &y).map_err(|e| e.to_string())?;
    let (sigma2, sigma2_item) = support::anova::anova_components(&support::anova::table(&y, 4));
    ensure((fit.sigma2_resid - sigma2).abs() < 1e-6, || format!("residual {} vs {sigma2}", fit.sigma2_resid))?;
    ensure((fit.sigma2_item - sigma2_item).abs() < 1e-6, || format!("item {} vs {sigma2_item}", fit.sigma2_item))?;

    let (design, y) = balanced_2x2(&spec(0.0), 99);
    let fit = fit_mixed_reml(&design, &y).map_err(|e| e.to_string())?;
    let ols = support::anova::ols(&design, &y);
    for (a, b) in fit.beta.iter().zip(ols.iter()) {
        ensure((a - b).abs() < 1e-6, || format!("beta {a} vs OLS {b}"))?;
    }
    Ok(())
}

fn wald_calibration() -> Result<(), String> {
    let start = Instant::now();
    let cal = null_calibration(&SyntheticSpec::default(), 1000, 0.05, 0, Exec::Parallel);
    let elapsed = start.elapsed();
    ensure((0.03..=0.07).contains(&cal.rejection_rate), || {
        format!("rejection rate {}", cal.rejection_rate)
    })?;
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))
}

fn kn_language_model() -> Result<(), String> {
    use support::kn::{contexts, corpus, Oracle, DISCOUNT};
    let train = |s: &[Vec<String>], order| {
        NGramModel::train(s, &TrainConfig { order, discount: DISCOUNT, ..TrainConfig::default() })
            .map_err(|e| e.to_string())
    };
    let sentences = corpus(5, 45, 120);
    for order in 1..=5 {
        let model = train(&sentences, order)?;
        let words: Vec<String> = model.predictable().map(str::to_string).collect();
        for ctx in contexts(&sentences, order, 100, 100 + order as u64) {
            let total: f64 = words.iter().map(|w| model.cond_prob(&ctx, w)).sum();
            ensure((total - 1.0).abs() < 1e-9, || format!("order {order} {ctx:?} sums to {total}"))?;
        }
    }
    let sentences = corpus(11, 40, 60);
    let mut targets: Vec<String> = sentences
        .iter()
        .flatten()
        .cloned()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    ensure(targets.len() <= 50, || format!("{} types", targets.len()))?;
    targets.extend([EOS.to_string(), UNK.to_string()]);
    for order in 1..=4 {
        let model = train(&sentences, order)?;
        let oracle = Oracle::new(&sentences, order);
        for ctx in contexts(&sentences, order, 12, order as u64) {
            for w in &targets {
                let (got, want) = (model.cond_prob(&ctx, w), oracle.prob(&ctx, w));
                ensure((got - want).abs() < 1e-9, || format!("order {order} {ctx:?} {w}: {got} vs {want}"))?;
            }
        }
    }
    Ok(())
}

fn bundled_suites() -> Vec<TestSuite> {
    bundled::templates()
        .into_iter()
        .map(|(t, n)| t.expand_to_suite(n).expect("bundled template expands"))
        .collect()
}

fn conservation() -> Result<(), String> {
    let suites = bundled_suites();
    let text: String = suites
        .iter()
        .flat_map(|s| &s.items)
        .flat_map(|i| i.sentences.values())
        .step_by(2)
        .map(|s| s.surface() + "\n")
        .collect();
    let model = NGramModel::train_text(&text, &TrainConfig { order: 4, ..TrainConfig::default() })
        .map_err(|e| e.to_string())?;
    let external = |args: &[&str]| -> Result<Box<dyn Scorer>, String> {
        let mut command = vec![common::mock_scorer()];
        command.extend(args.iter().map(|s| s.to_string()));
        Ok(Box::new(ExternalScorer::spawn(&command, ExternalConfig::default()).map_err(|e| e.to_string())?))
    };
    let mut scorers: Vec<Box<dyn Scorer>> = vec![
        Box::new(BuiltinScorer::new(model)),
        external(&["--piece-prefix", "##", "--log-base", "e"])?,
    ];
    let mut checked = 0;
    for scorer in &mut scorers {
        for suite in &suites {
            let scored = score_suite(suite, scorer.as_mut()).map_err(|e| e.to_string())?;
            for s in &scored {
                let (regions, tokens) = (s.total_region_surprisal(), s.total_token_surprisal());
                ensure((regions - tokens).abs() <= 1e-6, || format!("{}: {regions} vs {tokens}", s.text))?;
                checked += 1;
            }
        }
    }
    ensure(checked > 1000, || format!("only {checked} sentences"))
}

fn within_item_ci_check() -> Result<(), String> {
    let to_values = |rows: &[Vec<f64>]| -> BTreeMap<u32, IndexMap<String, f64>> {
        rows.iter()
            .enumerate()
            .map(|(i, r)| (i as u32 + 1, r.iter().enumerate().map(|(j, v)| (format!("c{j}"), *v)).collect()))
            .collect()
    };
    // items x conditions; half-width from independently computed t quantile
    let rows = vec![vec![5.0, 7.5], vec![3.0, 4.0], vec![6.5, 10.0]];
    let ci = within_item_ci(&to_values(&rows), 0.95).map_err(|e| e.to_string())?;
    for c in &ci.conditions {
        ensure((c.half_width - 1.5629023698245759).abs() < 1e-9, || format!("half width {}", c.half_width))?;
    }
    ensure((ci.conditions[0].mean - 14.5 / 3.0).abs() < 1e-9, || "condition mean".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let n = rng.random_range(2..12);
        let c = rng.random_range(1..5);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..c).map(|_| rng.random_range(-10.0..10.0)).collect()).collect();
        let shifted: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| {
                let off = rng.random_range(-100.0..100.0);
                r.iter().map(|v| v + off).collect()
            })
            .collect();
        let a = within_item_ci(&to_values(&rows), 0.95).map_err(|e| e.to_string())?;
        let b = within_item_ci(&to_values(&shifted), 0.95).map_err(|e| e.to_string())?;
        for (x, y) in a.conditions.iter().zip(&b.conditions) {
            ensure((x.half_width - y.half_width).abs() < 1e-9, || format!("{} vs {}", x.half_width, y.half_width))?;
        }
    }
    Ok(())
}

fn end_to_end_directional() -> Result<(), String> {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let model = common::trained_model(dir.path(), 5);
    let suite = common::write_suite(dir.path(), &common::filler_gap_suite(7, 20));
    let out = common::gapscope()
        .args(["run", "--scorer", "builtin", "--model"])
        .arg(&model)
        .arg("--suite")
        .arg(&suite)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || common::stderr(&out))?;
    let summary: serde_json::Value = serde_json::from_str(&common::stdout(&out)).map_err(|e| e.to_string())?;
    let s = &summary["suites"][0];
    let mean = s["estimates"][0]["mean"].as_f64().ok_or("no mean")?;
    let p = s["key_tests"][0]["p"].as_f64().ok_or("no p-value")?;
    ensure(mean > 0.0 && p < 0.05, || format!("mean {mean}, p {p}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))
}

fn bundled_suites_validate() -> Result<(), String> {
    let expected = |name: &str| -> std::ops::RangeInclusive<usize> {
        match name {
            "unboundedness" => 23..=23,
            "hierarchy" => 24..=24,
            "left_branch_island" => 20..=20,
            n if n.starts_with("gender_") => 30..=30,
            _ => 20..=24,
        }
    };
    let names: Vec<String> = bundled_suites().iter().map(|s| s.name.clone()).collect();
    ensure(names.len() == 15, || format!("{} bundled suites", names.len()))?;
    let out = common::gapscope()
        .arg("validate")
        .args(&names)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || common::stdout(&out))?;
    let stdout = common::stdout(&out);
    for name in &names {
        let line = stdout
            .lines()
            .find(|l| l.starts_with(&format!("{name}: ok (")))
            .ok_or_else(|| format!("{name} not reported valid"))?;
        let count: usize = line
            .trim_start_matches(&format!("{name}: ok ("))
            .trim_end_matches(" items)")
            .parse()
            .map_err(|_| line.to_string())?;
        ensure(expected(name).contains(&count), || format!("{name}: {count} items"))?;
    }
    Ok(())
}

#[test]
fn acceptance() {
    let checks: [(&str, Check); 9] = [
        ("metric correctness", metric_correctness),
        ("regression/metric consistency", regression_consistency),
        ("REML oracle", reml_oracle),
        ("Wald calibration", wald_calibration),
        ("Kneser-Ney language model", kn_language_model),
        ("region/token conservation", conservation),
        ("within-item confidence intervals", within_item_ci_check),
        ("end-to-end directional check", end_to_end_directional),
        ("bundled suites validate", bundled_suites_validate),
    ];
    let mut failed = Vec::new();
    writeln!(std::io::stdout()).unwrap();
    for (name, check) in checks {
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        // write to the real stdout so the lines show without --nocapture
        let mut out = std::io::stdout().lock();
        match outcome {
            Ok(()) => writeln!(out, "[PASS] {name}").unwrap(),
            Err(why) => {
                writeln!(out, "[FAIL] {name}: {why}").unwrap();
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
