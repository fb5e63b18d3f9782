//! Synthetic corpus where a fronted `who` goes with a missing object and
//! `that` with an overt one, plus a filler x gap suite probing it.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gapscope_core::suite::{
    serialize_suite, Cell, Factor, Item, MetricKind, Region, RegionedSentence, SuiteMetadata,
    TestSuite,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NOUNS: [&str; 8] = ["teacher", "doctor", "farmer", "singer", "pilot", "lawyer", "baker", "nurse"];
const VERBS: [&str; 8] = ["saw", "met", "helped", "called", "thanked", "visited", "hired", "praised"];
const OBJECTS: [&str; 6] = ["boy", "girl", "man", "woman", "child", "guest"];
const ADVERBS: [&str; 6] = ["yesterday", "today", "recently", "twice", "again", "once"];

pub fn gapscope() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gapscope"))
}

pub fn mock_scorer() -> String {
    env!("CARGO_BIN_EXE_mock-scorer").to_string()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn pick<'a>(rng: &mut ChaCha8Rng, words: &[&'a str]) -> &'a str {
    words[rng.random_range(0..words.len())]
}

pub fn corpus(seed: u64, n: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for _ in 0..n {
        let (noun, verb, adv) = (pick(&mut rng, &NOUNS), pick(&mut rng, &VERBS), pick(&mut rng, &ADVERBS));
        if rng.random_bool(0.5) {
            out += &format!("i know who the {noun} {verb} {adv} .\n");
        } else {
            let obj = pick(&mut rng, &OBJECTS);
            out += &format!("i know that the {noun} {verb} the {obj} {adv} .\n");
        }
    }
    out
}

pub fn filler_gap_suite(seed: u64, n_items: usize) -> TestSuite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors = vec![
        Factor::new("filler", &["yes", "no"]),
        Factor::new("gap", &["yes", "no"]),
    ];
    let items = (1..=n_items as u32)
        .map(|item_id| {
            let noun = pick(&mut rng, &NOUNS);
            let verb = pick(&mut rng, &VERBS);
            let obj = pick(&mut rng, &OBJECTS);
            let adv = pick(&mut rng, &ADVERBS);
            let mut sentences = BTreeMap::new();
            for (f, filler) in [(0, "who"), (1, "that")] {
                for (g, object) in [(0, String::new()), (1, format!("the {obj}"))] {
                    let sentence = RegionedSentence::new(vec![
                        Region::new("prefix", "i know"),
                        Region::new("filler", filler),
                        Region::new("subject", &format!("the {noun}")),
                        Region::new("verb", verb),
                        Region::new("object", &object),
                        Region::new("post_gap", adv),
                        Region::new("end", "."),
                    ]);
                    sentences.insert(Cell(vec![f, g]), sentence);
                }
            }
            Item { item_id, sentences }
        })
        .collect();
    TestSuite {
        name: "synthetic_filler_gap".into(),
        factors,
        measurement_region: "post_gap".into(),
        metric: MetricKind::LicensingInteraction,
        items,
        metadata: SuiteMetadata {
            source: Some("synthetic".into()),
            item_count: Some(n_items),
            reconstructed: false,
            notes: None,
        },
    }
}

/// Train a model on the synthetic corpus with the CLI; returns the model path.
pub fn trained_model(dir: &Path, order: u32) -> PathBuf {
    let corpus_path = dir.join("corpus.txt");
    std::fs::write(&corpus_path, corpus(1, 3000)).unwrap();
    let model = dir.join("model.bin");
    let out = gapscope()
        .args(["train", "--corpus"])
        .arg(&corpus_path)
        .args(["--order", &order.to_string(), "--out"])
        .arg(&model)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    model
}

pub fn write_suite(dir: &Path, suite: &TestSuite) -> PathBuf {
    let path = dir.join(format!("{}.json", suite.name));
    std::fs::write(&path, serialize_suite(suite)).unwrap();
    path
}
