//! Licensing interaction and expectation-effect metrics over the
//! measurement region.

use std::collections::{BTreeMap, HashMap};

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::scoring::ScoredSentence;
use crate::suite::{
    Cell, MetricKind, TestSuite, ABSENT, FILLER, GAP, MATCH, MATCHING, MISMATCHING, PRESENT,
    STRUCTURE,
};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("missing cell {0}")]
    MissingCell(String),
    #[error("item sets differ between levels: only in reference {only_reference:?}, only in test {only_test:?}")]
    ItemMismatch {
        only_reference: Vec<u32>,
        only_test: Vec<u32>,
    },
    #[error("suite design does not support metric {0}")]
    Design(MetricKind),
    #[error("scored sentence for item {item_id} lacks region '{region}'")]
    MissingRegion { item_id: u32, region: String },
}

/// `[S(+F,-G) - S(-F,-G)] - [S(+F,+G) - S(-F,+G)]`, keyed by
/// `(filler present, gap present)`.
pub fn licensing_interaction(cells: &HashMap<(bool, bool), f64>) -> Result<f64, MetricError> {
    let get = |filler: bool, gap: bool| {
        cells.get(&(filler, gap)).copied().ok_or_else(|| {
            MetricError::MissingCell(format!(
                "filler={},gap={}",
                if filler { PRESENT } else { ABSENT },
                if gap { PRESENT } else { ABSENT }
            ))
        })
    };
    let filled = get(true, false)? - get(false, false)?;
    let gapped = get(true, true)? - get(false, true)?;
    Ok(filled - gapped)
}

/// `S(mismatch) - S(match)`, keyed by "pronoun matches".
pub fn expectation_effect(cells: &HashMap<bool, f64>) -> Result<f64, MetricError> {
    let matching = cells
        .get(&true)
        .ok_or_else(|| MetricError::MissingCell(MATCHING.into()))?;
    let mismatching = cells
        .get(&false)
        .ok_or_else(|| MetricError::MissingCell(MISMATCHING.into()))?;
    Ok(mismatching - matching)
}

/// Metric values for one combination of the non-designated factors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricResult {
    pub suite: String,
    pub kind: MetricKind,
    /// Levels of the factors the metric does not consume (e.g. structure).
    pub slice: IndexMap<String, String>,
    pub per_item: BTreeMap<u32, f64>,
    /// Mean measurement-region surprisal per cell in this slice.
    pub condition_means: IndexMap<String, f64>,
    /// The metric applied to `condition_means`.
    pub metric_of_means: f64,
}

impl MetricResult {
    pub fn mean(&self) -> f64 {
        self.per_item.values().sum::<f64>() / self.per_item.len() as f64
    }

    pub fn slice_label(&self) -> String {
        if self.slice.is_empty() {
            return "all".into();
        }
        self.slice
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Per-item difference between a test slice and its reference slice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contrast {
    pub factor: String,
    pub reference: String,
    pub test: String,
    pub per_item: BTreeMap<u32, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteMetrics {
    pub suite: String,
    pub kind: MetricKind,
    pub measurement_region: String,
    /// Mean measurement-region surprisal of every cell, across items.
    pub condition_means: IndexMap<String, f64>,
    pub slices: Vec<MetricResult>,
    pub contrasts: Vec<Contrast>,
}

/// Per-item difference `test - reference`, matched by item id. Negative
/// values mean the metric is attenuated in the test level.
pub fn interaction_contrast(
    reference: &MetricResult,
    test: &MetricResult,
) -> Result<BTreeMap<u32, f64>, MetricError> {
    let only_reference: Vec<u32> = reference
        .per_item
        .keys()
        .filter(|id| !test.per_item.contains_key(id))
        .copied()
        .collect();
    let only_test: Vec<u32> = test
        .per_item
        .keys()
        .filter(|id| !reference.per_item.contains_key(id))
        .copied()
        .collect();
    if !only_reference.is_empty() || !only_test.is_empty() {
        return Err(MetricError::ItemMismatch {
            only_reference,
            only_test,
        });
    }
    Ok(test
        .per_item
        .iter()
        .map(|(id, v)| (*id, v - reference.per_item[id]))
        .collect())
}

/// Measurement-region surprisal for every (item, cell).
pub fn measurement_values(
    suite: &TestSuite,
    scored: &[ScoredSentence],
) -> Result<BTreeMap<(u32, Cell), f64>, MetricError> {
    scored
        .iter()
        .map(|s| {
            let v = s
                .region_surprisals
                .get(&suite.measurement_region)
                .copied()
                .ok_or_else(|| MetricError::MissingRegion {
                    item_id: s.item_id,
                    region: suite.measurement_region.clone(),
                })?;
            let cell = suite
                .cell_for(&s.condition)
                .map_err(MetricError::MissingCell)?;
            Ok(((s.item_id, cell), v))
        })
        .collect()
}

fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values
        .into_iter()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

/// Compute the suite's metric within every combination of the factors the
/// metric does not consume, plus contrasts along the structure factor.
pub fn compute_metrics(
    suite: &TestSuite,
    values: &BTreeMap<(u32, Cell), f64>,
) -> Result<SuiteMetrics, MetricError> {
    let designated: Vec<usize> = match suite.metric {
        MetricKind::LicensingInteraction => [FILLER, GAP]
            .iter()
            .map(|n| suite.factor_index(n).ok_or(MetricError::Design(suite.metric)))
            .collect::<Result<_, _>>()?,
        MetricKind::ExpectationEffect => vec![suite
            .factor_index(MATCH)
            .ok_or(MetricError::Design(suite.metric))?],
        MetricKind::ConditionMeans => Vec::new(),
    };
    let level = |f: usize, label: &str| {
        suite.factors[f]
            .level_index(label)
            .ok_or(MetricError::Design(suite.metric))
    };

    let cells = suite.cells();
    let cell_mean = |cell: &Cell| {
        mean(
            suite
                .items
                .iter()
                .filter_map(|item| values.get(&(item.item_id, cell.clone())).copied()),
        )
    };
    let condition_means: IndexMap<String, f64> = cells
        .iter()
        .map(|c| (suite.condition_label(c), cell_mean(c)))
        .collect();

    let others: Vec<usize> = (0..suite.factors.len())
        .filter(|f| !designated.contains(f))
        .collect();
    let mut slice_keys: Vec<Vec<usize>> = Vec::new();
    for cell in &cells {
        let key: Vec<usize> = others.iter().map(|&f| cell.0[f]).collect();
        if !slice_keys.contains(&key) {
            slice_keys.push(key);
        }
    }
    if suite.metric == MetricKind::ConditionMeans {
        slice_keys = vec![Vec::new()];
    }

    let mut slices = Vec::with_capacity(slice_keys.len());
    for key in &slice_keys {
        let in_slice = |cell: &Cell| others.iter().zip(key).all(|(&f, &l)| cell.0[f] == l);
        let make_cell = |assign: &[(usize, usize)]| {
            let mut levels = vec![0; suite.factors.len()];
            for (&f, &l) in others.iter().zip(key) {
                levels[f] = l;
            }
            for &(f, l) in assign {
                levels[f] = l;
            }
            Cell(levels)
        };
        let apply = |lookup: &dyn Fn(&Cell) -> Option<f64>| -> Result<Option<f64>, MetricError> {
            match suite.metric {
                MetricKind::LicensingInteraction => {
                    let (fi, gi) = (designated[0], designated[1]);
                    let mut cells = HashMap::new();
                    for (filler, f_label) in [(true, PRESENT), (false, ABSENT)] {
                        for (gap, g_label) in [(true, PRESENT), (false, ABSENT)] {
                            let cell = make_cell(&[(fi, level(fi, f_label)?), (gi, level(gi, g_label)?)]);
                            if let Some(v) = lookup(&cell) {
                                cells.insert((filler, gap), v);
                            }
                        }
                    }
                    Ok(licensing_interaction(&cells).ok())
                }
                MetricKind::ExpectationEffect => {
                    let mi = designated[0];
                    let mut cells = HashMap::new();
                    for (matches, label) in [(true, MATCHING), (false, MISMATCHING)] {
                        if let Some(v) = lookup(&make_cell(&[(mi, level(mi, label)?)])) {
                            cells.insert(matches, v);
                        }
                    }
                    Ok(expectation_effect(&cells).ok())
                }
                MetricKind::ConditionMeans => Ok(None),
            }
        };

        let mut per_item = BTreeMap::new();
        for item in &suite.items {
            let lookup = |c: &Cell| values.get(&(item.item_id, c.clone())).copied();
            if let Some(v) = apply(&lookup)? {
                per_item.insert(item.item_id, v);
            }
        }
        let slice_cells: Vec<&Cell> = cells
            .iter()
            .filter(|c| suite.metric == MetricKind::ConditionMeans || in_slice(c))
            .collect();
        let means: HashMap<&Cell, f64> = slice_cells.iter().map(|c| (*c, cell_mean(c))).collect();
        let metric_of_means = apply(&|c: &Cell| means.get(c).copied())?.unwrap_or(f64::NAN);
        slices.push(MetricResult {
            suite: suite.name.clone(),
            kind: suite.metric,
            slice: others
                .iter()
                .zip(key)
                .map(|(&f, &l)| (suite.factors[f].name.clone(), suite.factors[f].levels[l].clone()))
                .collect(),
            per_item,
            condition_means: slice_cells
                .iter()
                .map(|c| (suite.condition_label(c), means[c]))
                .collect(),
            metric_of_means,
        });
    }

    let contrasts = if suite.metric == MetricKind::ConditionMeans {
        Vec::new()
    } else {
        structure_contrasts(suite, &others, &slices)?
    };
    Ok(SuiteMetrics {
        suite: suite.name.clone(),
        kind: suite.metric,
        measurement_region: suite.measurement_region.clone(),
        condition_means,
        slices,
        contrasts,
    })
}

/// The factor contrasts are taken along: `structure` when present, otherwise
/// the last factor the metric does not consume.
pub fn contrast_factor(suite: &TestSuite) -> Option<usize> {
    let designated = [FILLER, GAP, MATCH];
    suite.factor_index(STRUCTURE).or_else(|| {
        (0..suite.factors.len())
            .rev()
            .find(|&f| !designated.contains(&suite.factors[f].name.as_str()))
    })
}

fn structure_contrasts(
    suite: &TestSuite,
    others: &[usize],
    slices: &[MetricResult],
) -> Result<Vec<Contrast>, MetricError> {
    let Some(factor) = contrast_factor(suite) else {
        return Ok(Vec::new());
    };
    let name = &suite.factors[factor].name;
    let reference_level = &suite.factors[factor].levels[0];
    let mut contrasts = Vec::new();
    for test in slices {
        if test.slice.get(name) == Some(reference_level) {
            continue;
        }
        let reference = slices
            .iter()
            .find(|r| {
                others.iter().all(|&f| {
                    let key = &suite.factors[f].name;
                    if key == name {
                        r.slice.get(key) == Some(reference_level)
                    } else {
                        r.slice.get(key) == test.slice.get(key)
                    }
                })
            })
            .expect("reference slice exists");
        contrasts.push(Contrast {
            factor: name.clone(),
            reference: reference.slice_label(),
            test: test.slice_label(),
            per_item: interaction_contrast(reference, test)?,
        });
    }
    Ok(contrasts)
}

fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

/// Tidy CSV: one row per (item, slice) with the slice's factor levels as
/// columns. Numbers use a period decimal separator regardless of locale.
pub fn metrics_csv(metrics: &SuiteMetrics) -> String {
    let slice_columns: Vec<String> = metrics
        .slices
        .first()
        .map(|s| s.slice.keys().cloned().collect())
        .unwrap_or_default();
    let mut out = String::from("item_id");
    for c in &slice_columns {
        out.push(',');
        out.push_str(&csv_field(c));
    }
    out.push_str(",metric,value\n");
    for slice in &metrics.slices {
        for (id, value) in &slice.per_item {
            out.push_str(&id.to_string());
            for c in &slice_columns {
                out.push(',');
                out.push_str(&csv_field(slice.slice.get(c).map_or("", String::as_str)));
            }
            out.push_str(&format!(",{},{}\n", metrics.kind, value));
        }
    }
    out
}
