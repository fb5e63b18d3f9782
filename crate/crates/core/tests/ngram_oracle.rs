//! The n-gram model against the brute-force oracle in `support`.

mod support;

use std::collections::BTreeSet;

use gapscope_core::ngram::{NGramModel, TrainConfig, BOS, EOS, UNK};
use support::kn::{contexts, corpus, Oracle, DISCOUNT};

fn train(sentences: &[Vec<String>], order: usize) -> NGramModel {
    NGramModel::train(
        sentences,
        &TrainConfig {
            order,
            discount: DISCOUNT,
            ..TrainConfig::default()
        },
    )
    .unwrap()
}

#[test]
fn matches_brute_force_oracle() {
    let sentences = corpus(11, 40, 60);
    let types: BTreeSet<&String> = sentences.iter().flatten().collect();
    assert!(types.len() <= 50);
    for order in 1..=4 {
        let model = train(&sentences, order);
        let oracle = Oracle::new(&sentences, order);
        let mut targets: Vec<String> = types.iter().map(|s| s.to_string()).collect();
        targets.push(EOS.into());
        targets.push(UNK.into());
        for ctx in contexts(&sentences, order, 12, order as u64) {
            for w in &targets {
                let got = model.cond_prob(&ctx, w);
                let want = oracle.prob(&ctx, w);
                assert!(
                    (got - want).abs() < 1e-9,
                    "order {order}, context {ctx:?}, word {w}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn conditionals_sum_to_one() {
    let sentences = corpus(5, 45, 120);
    for order in 1..=5 {
        let model = train(&sentences, order);
        let predictable: Vec<String> = model.predictable().map(str::to_string).collect();
        assert_eq!(predictable.len(), model.predictable_size());
        for ctx in contexts(&sentences, order, 100, 100 + order as u64) {
            let total: f64 = predictable.iter().map(|w| model.cond_prob(&ctx, w)).sum();
            assert!((total - 1.0).abs() < 1e-9, "order {order} {ctx:?}: {total}");
        }
    }
}

#[test]
fn bigram_hand_counts() {
    let sentences = vec!["the cat sat on the mat the cat ran away"
        .split(' ')
        .map(str::to_string)
        .collect::<Vec<_>>()];
    let model = train(&sentences, 2);
    // continuation counts: the 3, every other word and </s> 1; total 10 over
    // 8 types; V = 7 words + <unk> + </s> = 9
    let p1_cat: f64 = (1.0 - 0.75 + 0.75 * 8.0 / 9.0) / 10.0;
    assert!((p1_cat - 11.0 / 120.0).abs() < 1e-15);
    assert!((model.cond_prob(&["the"], "cat") - 111.0 / 240.0).abs() < 1e-12);
    assert!((model.cond_prob(&["the"], "the") - 7.0 / 48.0).abs() < 1e-12);
    assert!((model.cond_prob(&[BOS], "away") - 0.75 * 11.0 / 120.0).abs() < 1e-12);
    // unseen context backs off to the unigram level
    assert!((model.cond_prob(&["zebra"], "cat") - 11.0 / 120.0).abs() < 1e-12);
}

#[test]
fn more_evidence_never_lowers_probability() {
    let base = corpus(3, 20, 40);
    let mut previous = 0.0;
    for extra in 0..6 {
        let mut sentences = base.clone();
        for _ in 0..extra {
            sentences.push(vec!["w3".into(), "w17".into()]);
        }
        let p = train(&sentences, 3).cond_prob(&["w3"], "w17");
        assert!(p >= previous, "{extra} extra: {p} < {previous}");
        previous = p;
    }
}
