use std::collections::{BTreeMap, HashMap};

use gapscope_core::metrics::{
    compute_metrics, expectation_effect, interaction_contrast, licensing_interaction,
    measurement_values, MetricResult,
};
use gapscope_core::ngram::{NGramModel, TrainConfig};
use gapscope_core::scoring::{score_suite, BuiltinScorer};
use gapscope_core::suite::{bundled, MetricKind};
use indexmap::IndexMap;
use proptest::prelude::*;

fn cells(v: [f64; 4]) -> HashMap<(bool, bool), f64> {
    // (-F-G, +F-G, -F+G, +F+G)
    HashMap::from([
        ((false, false), v[0]),
        ((true, false), v[1]),
        ((false, true), v[2]),
        ((true, true), v[3]),
    ])
}

#[test]
fn constructed_table() {
    assert_eq!(licensing_interaction(&cells([10.0, 14.0, 12.0, 8.0])).unwrap(), 8.0);
}

fn result(per_item: BTreeMap<u32, f64>) -> MetricResult {
    MetricResult {
        suite: "s".into(),
        kind: MetricKind::LicensingInteraction,
        slice: IndexMap::new(),
        per_item,
        condition_means: IndexMap::new(),
        metric_of_means: 0.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn swapping_gap_levels_negates(v in prop::array::uniform4(-100.0f64..100.0)) {
        let swapped = [v[2], v[3], v[0], v[1]];
        let a = licensing_interaction(&cells(v)).unwrap();
        let b = licensing_interaction(&cells(swapped)).unwrap();
        prop_assert!((a + b).abs() < 1e-12);
    }

    #[test]
    fn constant_shift_leaves_interaction(v in prop::array::uniform4(-100.0f64..100.0), c in -100.0f64..100.0) {
        let shifted = v.map(|x| x + c);
        let a = licensing_interaction(&cells(v)).unwrap();
        let b = licensing_interaction(&cells(shifted)).unwrap();
        prop_assert!((a - b).abs() < 1e-12 * (1.0 + v.iter().map(|x| x.abs()).sum::<f64>() + 4.0 * c.abs()));
    }

    #[test]
    fn metric_of_means_is_mean_of_metric(tables in prop::collection::vec(prop::array::uniform4(-50.0f64..50.0), 1..30)) {
        let n = tables.len() as f64;
        let mut mean = [0.0; 4];
        for t in &tables {
            for j in 0..4 {
                mean[j] += t[j] / n;
            }
        }
        let of_means = licensing_interaction(&cells(mean)).unwrap();
        let mean_of: f64 = tables.iter().map(|t| licensing_interaction(&cells(*t)).unwrap()).sum::<f64>() / n;
        prop_assert!((of_means - mean_of).abs() < 1e-12 * 400.0);
    }

    #[test]
    fn expectation_is_antisymmetric(a in -50.0f64..50.0, b in -50.0f64..50.0) {
        let x = expectation_effect(&HashMap::from([(true, a), (false, b)])).unwrap();
        let y = expectation_effect(&HashMap::from([(true, b), (false, a)])).unwrap();
        prop_assert_eq!(x, -y);
    }

    #[test]
    fn contrast_matches_by_id(values in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..20)) {
        let control: BTreeMap<u32, f64> = values.iter().enumerate().map(|(i, v)| (i as u32, v.0)).collect();
        let island: BTreeMap<u32, f64> = values.iter().enumerate().rev().map(|(i, v)| (i as u32, v.1)).collect();
        let c = interaction_contrast(&result(control), &result(island)).unwrap();
        for (i, v) in values.iter().enumerate() {
            prop_assert_eq!(c[&(i as u32)], v.1 - v.0);
        }
    }
}

#[test]
fn trained_gender_association_gives_positive_expectation_effect() {
    let corpus = "the actress said they criticized her friends .\n\
                  the fireman said they insulted his friends .\n"
        .repeat(20);
    let model = NGramModel::train_text(
        &corpus,
        &TrainConfig {
            order: 5,
            ..TrainConfig::default()
        },
    )
    .unwrap();
    let (template, n) = bundled::templates()
        .into_iter()
        .find(|(t, _)| t.name == "gender_wh_island")
        .unwrap();
    let mut suite = template.expand_to_suite(n).unwrap();
    // item 1 is the fireman, item 16 the actress
    suite.items.retain(|i| i.item_id == 1 || i.item_id == 16);
    let scored = score_suite(&suite, &mut BuiltinScorer::new(model)).unwrap();
    let values = measurement_values(&suite, &scored).unwrap();
    let metrics = compute_metrics(&suite, &values).unwrap();
    let control = &metrics.slices[0];
    assert_eq!(control.slice["structure"], "control");
    assert_eq!(control.per_item.len(), 2);
    for (id, effect) in &control.per_item {
        assert!(*effect > 0.0, "item {id}: {effect}");
    }
}
