//! Template expansion: per-condition skeletons with `{slot}` placeholders,
//! filled row by row from a lexicon.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    validate_suite, Factor, Item, MetricKind, Region, RegionedSentence, SentenceFile, SuiteError,
    SuiteMetadata, TestSuite,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Template {
    pub name: String,
    pub factors: Vec<Factor>,
    pub measurement_region: String,
    pub metric: MetricKind,
    #[serde(default)]
    pub metadata: SuiteMetadata,
    /// One skeleton sentence per condition; region texts may contain `{slot}`.
    pub skeletons: Vec<Skeleton>,
    /// Slot name to fillers; item `i` takes row `i` of every list.
    pub lexicon: IndexMap<String, Vec<String>>,
    /// Groups of slots whose rows belong together and must be equally long.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub paired: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Skeleton {
    pub condition: IndexMap<String, String>,
    pub regions: Vec<Region>,
}

impl From<Skeleton> for SentenceFile {
    fn from(s: Skeleton) -> Self {
        SentenceFile {
            condition: s.condition,
            regions: s.regions,
        }
    }
}

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("template syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("slot '{slot}' used in condition {condition} has no lexicon entry")]
    UnknownSlot { slot: String, condition: String },
    #[error("unterminated slot placeholder in region '{region}': {text}")]
    Unterminated { region: String, text: String },
    #[error("paired slots {slots:?} have unequal lengths {lengths:?}")]
    PairedLength {
        slots: Vec<String>,
        lengths: Vec<usize>,
    },
    #[error("paired group names slot '{0}' which is not in the lexicon")]
    UnknownPairedSlot(String),
    #[error("requested {requested} items but slot '{slot}' has only {available} rows")]
    TooManyItems {
        requested: usize,
        slot: String,
        available: usize,
    },
    #[error("skeleton condition: {0}")]
    Condition(String),
    #[error(transparent)]
    Suite(#[from] SuiteError),
}

impl Template {
    pub fn from_json(text: &str) -> Result<Self, TemplateError> {
        serde_json::from_str(text).map_err(|e| TemplateError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("template serializes");
        out.push('\n');
        out
    }

    /// Largest item count the lexicon supports.
    pub fn capacity(&self) -> usize {
        self.lexicon.values().map(Vec::len).min().unwrap_or(usize::MAX)
    }

    fn check(&self) -> Result<(), TemplateError> {
        for group in &self.paired {
            let mut lengths = Vec::with_capacity(group.len());
            for slot in group {
                let rows = self
                    .lexicon
                    .get(slot)
                    .ok_or_else(|| TemplateError::UnknownPairedSlot(slot.clone()))?;
                lengths.push(rows.len());
            }
            if lengths.windows(2).any(|w| w[0] != w[1]) {
                return Err(TemplateError::PairedLength {
                    slots: group.clone(),
                    lengths,
                });
            }
        }
        for skeleton in &self.skeletons {
            for region in &skeleton.regions {
                for slot in slots_in(&region.name, &region.text)? {
                    if !self.lexicon.contains_key(slot) {
                        return Err(TemplateError::UnknownSlot {
                            slot: slot.to_string(),
                            condition: label(&skeleton.condition),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Expand and wrap the items in a validated suite.
    pub fn expand_to_suite(&self, n_items: usize) -> Result<TestSuite, TemplateError> {
        let items = expand_template(self, n_items)?;
        let mut metadata = self.metadata.clone();
        metadata.item_count = Some(items.len());
        let suite = TestSuite {
            name: self.name.clone(),
            factors: self.factors.clone(),
            measurement_region: self.measurement_region.clone(),
            metric: self.metric,
            items,
            metadata,
        };
        let diags = validate_suite(&suite);
        if diags.is_empty() {
            Ok(suite)
        } else {
            Err(SuiteError::Invalid(diags).into())
        }
    }
}

fn label(condition: &IndexMap<String, String>) -> String {
    condition
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn slots_in<'a>(region: &str, text: &'a str) -> Result<Vec<&'a str>, TemplateError> {
    let mut slots = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        let close = after.find('}').ok_or_else(|| TemplateError::Unterminated {
            region: region.to_string(),
            text: text.to_string(),
        })?;
        slots.push(&after[..close]);
        rest = &after[close + 1..];
    }
    Ok(slots)
}

fn fill(text: &str, lexicon: &IndexMap<String, Vec<String>>, row: usize) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = after.find('}').expect("placeholders checked");
        out.push_str(&lexicon[&after[..close]][row]);
        rest = &after[close + 1..];
    }
    out.push_str(rest);
    out
}

/// Expand a template into `n_items` items. Item `i` (ids start at 1) uses
/// row `i` of every lexicon list; the result is a pure function of the input.
pub fn expand_template(template: &Template, n_items: usize) -> Result<Vec<Item>, TemplateError> {
    template.check()?;
    if let Some((slot, rows)) = template
        .lexicon
        .iter()
        .find(|(_, rows)| rows.len() < n_items)
    {
        return Err(TemplateError::TooManyItems {
            requested: n_items,
            slot: slot.clone(),
            available: rows.len(),
        });
    }
    let probe = TestSuite {
        name: template.name.clone(),
        factors: template.factors.clone(),
        measurement_region: template.measurement_region.clone(),
        metric: template.metric,
        items: Vec::new(),
        metadata: SuiteMetadata::default(),
    };
    let cells = template
        .skeletons
        .iter()
        .map(|s| probe.cell_for(&s.condition).map_err(TemplateError::Condition))
        .collect::<Result<Vec<_>, _>>()?;

    let items = (0..n_items)
        .map(|row| {
            let sentences = template
                .skeletons
                .iter()
                .zip(&cells)
                .map(|(skeleton, cell)| {
                    let regions = skeleton
                        .regions
                        .iter()
                        .map(|r| Region::new(&r.name, &fill(&r.text, &template.lexicon, row)))
                        .collect();
                    (cell.clone(), RegionedSentence::new(regions))
                })
                .collect::<BTreeMap<_, _>>();
            Item {
                item_id: row as u32 + 1,
                sentences,
            }
        })
        .collect();
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn name_template() -> Template {
        Template::from_json(
            r#"{
              "name": "names",
              "factors": [{"name": "gap", "levels": ["yes", "no"]}],
              "measurement_region": "end",
              "metric": "condition_means",
              "skeletons": [
                {"condition": {"gap": "yes"}, "regions": [{"name": "subj", "text": "{name} saw"}, {"name": "obj", "text": ""}, {"name": "end", "text": "today"}]},
                {"condition": {"gap": "no"}, "regions": [{"name": "subj", "text": "{name} saw"}, {"name": "obj", "text": "it"}, {"name": "end", "text": "today"}]}
              ],
              "lexicon": {"name": ["Alex", "Sam", "Kim"]}
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn single_slot_substitution() {
        let items = expand_template(&name_template(), 3).unwrap();
        assert_eq!(items.len(), 3);
        let surfaces: Vec<String> = items
            .iter()
            .map(|i| i.sentences.values().next().unwrap().surface())
            .collect();
        assert_eq!(surfaces, ["Alex saw today", "Sam saw today", "Kim saw today"]);
        assert_eq!(items[2].item_id, 3);
    }

    #[test]
    fn too_many_items_is_an_error() {
        let err = expand_template(&name_template(), 5).unwrap_err();
        assert!(matches!(
            err,
            TemplateError::TooManyItems { requested: 5, available: 3, .. }
        ));
    }

    #[test]
    fn slot_without_lexicon_names_the_slot() {
        let mut t = name_template();
        t.skeletons[1].regions[1].text = "{thing}".into();
        let err = expand_template(&t, 1).unwrap_err();
        assert!(err.to_string().contains("thing"), "{err}");
    }

    #[test]
    fn paired_lists_must_match() {
        let mut t = name_template();
        t.lexicon.insert("pronoun".into(), vec!["her".into()]);
        t.paired = vec![vec!["name".into(), "pronoun".into()]];
        assert!(matches!(
            expand_template(&t, 1),
            Err(TemplateError::PairedLength { .. })
        ));
    }

    #[test]
    fn expansion_is_deterministic() {
        let t = name_template();
        assert_eq!(expand_template(&t, 3).unwrap(), expand_template(&t, 3).unwrap());
    }

    #[test]
    fn zero_items_fails_suite_validation() {
        assert!(matches!(
            name_template().expand_to_suite(0),
            Err(TemplateError::Suite(SuiteError::Invalid(_)))
        ));
    }
}
