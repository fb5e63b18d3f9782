//! Factorial test suites: factors, items, regioned sentences.
//!
//! A suite crosses every level of every factor; each item supplies one
//! sentence per cell of that cross. Sentences are split into named regions
//! so that the same measurement site can be located in every condition,
//! including conditions where an earlier region (a gap) is empty.

pub mod bundled;
pub mod template;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use template::{expand_template, Template, TemplateError};

/// Factor name that marks the presence or absence of a wh-filler.
pub const FILLER: &str = "filler";
/// Factor name that marks the presence or absence of a gap.
pub const GAP: &str = "gap";
/// Factor name for the pronoun match / mismatch manipulation.
pub const MATCH: &str = "match";
/// Factor name contrasting island and control structures.
pub const STRUCTURE: &str = "structure";

/// Level label for a present filler or gap.
pub const PRESENT: &str = "yes";
/// Level label for an absent filler or gap.
pub const ABSENT: &str = "no";
/// Level label for a gender-matching pronoun.
pub const MATCHING: &str = "match";
/// Level label for a gender-mismatching pronoun.
pub const MISMATCHING: &str = "mismatch";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub name: String,
    pub levels: Vec<String>,
}

impl Factor {
    pub fn new(name: &str, levels: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            levels: levels.iter().map(|l| l.to_string()).collect(),
        }
    }

    pub fn level_index(&self, label: &str) -> Option<usize> {
        self.levels.iter().position(|l| l == label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub name: String,
    pub text: String,
}

impl Region {
    pub fn new(name: &str, text: &str) -> Self {
        Self {
            name: name.to_string(),
            text: normalize_space(text),
        }
    }
}

/// Collapse runs of whitespace to single spaces and trim the ends.
pub fn normalize_space(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// A sentence as an ordered list of named, possibly empty, regions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionedSentence {
    pub regions: Vec<Region>,
}

impl RegionedSentence {
    pub fn new(regions: Vec<Region>) -> Self {
        Self { regions }
    }

    /// The surface string: nonempty region texts joined by single spaces.
    pub fn surface(&self) -> String {
        self.regions
            .iter()
            .filter(|r| !r.text.is_empty())
            .map(|r| r.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Byte span of every region inside [`surface`](Self::surface).
    /// Empty regions get a zero-width span at the position where they sit.
    pub fn spans(&self) -> Vec<(usize, usize)> {
        let mut spans = Vec::with_capacity(self.regions.len());
        let mut cursor = 0usize;
        let mut first = true;
        for region in &self.regions {
            if region.text.is_empty() {
                spans.push((cursor, cursor));
                continue;
            }
            if !first {
                cursor += 1;
            }
            first = false;
            let start = cursor;
            cursor += region.text.len();
            spans.push((start, cursor));
        }
        spans
    }

    pub fn region_names(&self) -> Vec<&str> {
        self.regions.iter().map(|r| r.name.as_str()).collect()
    }

    pub fn region(&self, name: &str) -> Option<&Region> {
        self.regions.iter().find(|r| r.name == name)
    }
}

/// One cell of the factorial cross: a level index per factor, in suite
/// factor order. Ordering is lexicographic, first factor slowest.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell(pub Vec<usize>);

#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub item_id: u32,
    pub sentences: BTreeMap<Cell, RegionedSentence>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    LicensingInteraction,
    ExpectationEffect,
    ConditionMeans,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::LicensingInteraction => "licensing_interaction",
            MetricKind::ExpectationEffect => "expectation_effect",
            MetricKind::ConditionMeans => "condition_means",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item_count: Option<usize>,
    /// True when items were authored for this toolkit rather than copied
    /// from a published item list.
    #[serde(default)]
    pub reconstructed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestSuite {
    pub name: String,
    pub factors: Vec<Factor>,
    pub measurement_region: String,
    pub metric: MetricKind,
    pub items: Vec<Item>,
    pub metadata: SuiteMetadata,
}

impl TestSuite {
    pub fn factor_index(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.name == name)
    }

    /// Number of cells in the full factorial cross.
    pub fn n_cells(&self) -> usize {
        self.factors.iter().map(|f| f.levels.len()).product()
    }

    /// Every cell of the cross, in canonical order.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = vec![Vec::new()];
        for factor in &self.factors {
            cells = cells
                .into_iter()
                .flat_map(|prefix| {
                    (0..factor.levels.len()).map(move |level| {
                        let mut next = prefix.clone();
                        next.push(level);
                        next
                    })
                })
                .collect();
        }
        cells.into_iter().map(Cell).collect()
    }

    /// `factor=level` pairs, in factor order.
    pub fn condition_map(&self, cell: &Cell) -> IndexMap<String, String> {
        self.factors
            .iter()
            .zip(&cell.0)
            .map(|(f, &l)| {
                let level = f.levels.get(l).cloned().unwrap_or_else(|| format!("#{l}"));
                (f.name.clone(), level)
            })
            .collect()
    }

    /// Compact human-readable label such as `filler=yes,gap=no`.
    pub fn condition_label(&self, cell: &Cell) -> String {
        self.condition_map(cell)
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn cell_for(&self, condition: &IndexMap<String, String>) -> Result<Cell, String> {
        if condition.len() != self.factors.len() {
            return Err(format!(
                "condition names {} factors, suite has {}",
                condition.len(),
                self.factors.len()
            ));
        }
        let mut levels = Vec::with_capacity(self.factors.len());
        for factor in &self.factors {
            let label = condition
                .get(&factor.name)
                .ok_or_else(|| format!("condition lacks factor '{}'", factor.name))?;
            let idx = factor
                .level_index(label)
                .ok_or_else(|| format!("unknown level '{label}' for factor '{}'", factor.name))?;
            levels.push(idx);
        }
        Ok(Cell(levels))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticKind {
    NoFactors,
    TooFewLevels,
    DuplicateLevel,
    DuplicateFactor,
    NoItems,
    BadItemId,
    DuplicateItemId,
    MissingCell,
    DuplicateRegion,
    EmptySentence,
    MissingMeasurementRegion,
    InconsistentRegions,
    MetricDesign,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub item_id: Option<u32>,
    pub condition: Option<String>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.item_id, &self.condition) {
            (Some(id), Some(c)) => write!(f, "item {id} [{c}]: {}", self.message),
            (Some(id), None) => write!(f, "item {id}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("suite syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("item {item_id}: {message}")]
    BadCondition { item_id: u32, message: String },
    #[error("item {item_id}: duplicate sentence for condition {condition}")]
    DuplicateCell { item_id: u32, condition: String },
    #[error("invalid suite: {}", format_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

// On-disk shape of a suite file.

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    name: String,
    factors: Vec<Factor>,
    measurement_region: String,
    metric: MetricKind,
    #[serde(default, skip_serializing_if = "is_default_metadata")]
    metadata: SuiteMetadata,
    items: Vec<ItemFile>,
}

fn is_default_metadata(m: &SuiteMetadata) -> bool {
    *m == SuiteMetadata::default()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemFile {
    item_id: u32,
    sentences: Vec<SentenceFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SentenceFile {
    pub(crate) condition: IndexMap<String, String>,
    pub(crate) regions: Vec<Region>,
}

/// Parse and validate a JSON suite file.
pub fn parse_suite(text: &str) -> Result<TestSuite, SuiteError> {
    let file: SuiteFile = serde_json::from_str(text).map_err(|e| SuiteError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut suite = TestSuite {
        name: file.name,
        factors: file.factors,
        measurement_region: file.measurement_region,
        metric: file.metric,
        items: Vec::with_capacity(file.items.len()),
        metadata: file.metadata,
    };
    let mut items = Vec::with_capacity(file.items.len());
    for item in file.items {
        let mut sentences = BTreeMap::new();
        for s in item.sentences {
            let cell = suite
                .cell_for(&s.condition)
                .map_err(|message| SuiteError::BadCondition {
                    item_id: item.item_id,
                    message,
                })?;
            let regions = s
                .regions
                .into_iter()
                .map(|r| Region::new(&r.name, &r.text))
                .collect();
            if sentences
                .insert(cell.clone(), RegionedSentence::new(regions))
                .is_some()
            {
                return Err(SuiteError::DuplicateCell {
                    item_id: item.item_id,
                    condition: suite.condition_label(&cell),
                });
            }
        }
        items.push(Item {
            item_id: item.item_id,
            sentences,
        });
    }
    suite.items = items;
    let diagnostics = validate_suite(&suite);
    if diagnostics.is_empty() {
        Ok(suite)
    } else {
        Err(SuiteError::Invalid(diagnostics))
    }
}

/// Serialize a suite to pretty-printed JSON in the suite file schema.
pub fn serialize_suite(suite: &TestSuite) -> String {
    let file = SuiteFile {
        name: suite.name.clone(),
        factors: suite.factors.clone(),
        measurement_region: suite.measurement_region.clone(),
        metric: suite.metric,
        metadata: suite.metadata.clone(),
        items: suite
            .items
            .iter()
            .map(|item| ItemFile {
                item_id: item.item_id,
                sentences: item
                    .sentences
                    .iter()
                    .map(|(cell, s)| SentenceFile {
                        condition: suite.condition_map(cell),
                        regions: s.regions.clone(),
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("suite serializes");
    out.push('\n');
    out
}

/// Check every suite invariant, returning one diagnostic per violation.
pub fn validate_suite(suite: &TestSuite) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let suite_diag = |kind, message: String| Diagnostic {
        kind,
        item_id: None,
        condition: None,
        message,
    };

    if suite.factors.is_empty() {
        diags.push(suite_diag(DiagnosticKind::NoFactors, "suite has no factors".into()));
    }
    let mut factor_names = HashSet::new();
    for factor in &suite.factors {
        if !factor_names.insert(factor.name.as_str()) {
            diags.push(suite_diag(
                DiagnosticKind::DuplicateFactor,
                format!("factor '{}' declared twice", factor.name),
            ));
        }
        if factor.levels.len() < 2 {
            diags.push(suite_diag(
                DiagnosticKind::TooFewLevels,
                format!("factor '{}' needs at least two levels", factor.name),
            ));
        }
        let mut seen = HashSet::new();
        for level in &factor.levels {
            if !seen.insert(level.as_str()) {
                diags.push(suite_diag(
                    DiagnosticKind::DuplicateLevel,
                    format!("factor '{}' repeats level '{level}'", factor.name),
                ));
            }
        }
    }
    diags.extend(metric_design_diagnostics(suite));
    if suite.items.is_empty() {
        diags.push(suite_diag(DiagnosticKind::NoItems, "suite has no items".into()));
    }

    let cells = suite.cells();
    let mut ids = HashSet::new();
    for item in &suite.items {
        let id = item.item_id;
        if id == 0 {
            diags.push(Diagnostic {
                kind: DiagnosticKind::BadItemId,
                item_id: Some(id),
                condition: None,
                message: "item ids must be positive".into(),
            });
        }
        if !ids.insert(id) {
            diags.push(Diagnostic {
                kind: DiagnosticKind::DuplicateItemId,
                item_id: Some(id),
                condition: None,
                message: "item id used more than once".into(),
            });
        }
        for cell in &cells {
            if !item.sentences.contains_key(cell) {
                diags.push(Diagnostic {
                    kind: DiagnosticKind::MissingCell,
                    item_id: Some(id),
                    condition: Some(suite.condition_label(cell)),
                    message: "no sentence for this condition".into(),
                });
            }
        }

        let reference = item
            .sentences
            .values()
            .find(|s| s.region(&suite.measurement_region).is_some())
            .map(|s| s.region_names());
        for (cell, sentence) in &item.sentences {
            let condition = Some(suite.condition_label(cell));
            let diag = |kind, message: String| Diagnostic {
                kind,
                item_id: Some(id),
                condition: condition.clone(),
                message,
            };
            let names = sentence.region_names();
            let mut seen = HashSet::new();
            if let Some(dup) = names.iter().find(|n| !seen.insert(**n)) {
                diags.push(diag(
                    DiagnosticKind::DuplicateRegion,
                    format!("region '{dup}' appears twice"),
                ));
            }
            if sentence.regions.iter().all(|r| r.text.is_empty()) {
                diags.push(diag(
                    DiagnosticKind::EmptySentence,
                    "every region is empty".into(),
                ));
            }
            if sentence.region(&suite.measurement_region).is_none() {
                diags.push(diag(
                    DiagnosticKind::MissingMeasurementRegion,
                    format!(
                        "measurement region '{}' not present",
                        suite.measurement_region
                    ),
                ));
                continue;
            }
            if let Some(reference) = &reference {
                if &names != reference {
                    diags.push(diag(
                        DiagnosticKind::InconsistentRegions,
                        format!(
                            "regions [{}] differ from [{}]",
                            names.join(", "),
                            reference.join(", ")
                        ),
                    ));
                }
            }
        }
    }
    diags
}

fn metric_design_diagnostics(suite: &TestSuite) -> Vec<Diagnostic> {
    let required: &[(&str, &[&str])] = match suite.metric {
        MetricKind::LicensingInteraction => {
            &[(FILLER, &[PRESENT, ABSENT]), (GAP, &[PRESENT, ABSENT])]
        }
        MetricKind::ExpectationEffect => &[(MATCH, &[MATCHING, MISMATCHING])],
        MetricKind::ConditionMeans => &[],
    };
    let mut diags = Vec::new();
    for (name, levels) in required {
        let ok = suite.factor_index(name).is_some_and(|i| {
            let f = &suite.factors[i];
            f.levels.len() == 2 && levels.iter().all(|l| f.level_index(l).is_some())
        });
        if !ok {
            diags.push(Diagnostic {
                kind: DiagnosticKind::MetricDesign,
                item_id: None,
                condition: None,
                message: format!(
                    "metric {} requires a binary factor '{name}' with levels {}",
                    suite.metric,
                    levels.join("/")
                ),
            });
        }
    }
    diags
}
