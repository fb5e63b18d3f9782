//! Scoring suites for per-token surprisal and collapsing it onto regions.

mod align;
mod builtin;
mod external;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use align::{align_to_regions, normalize_piece, AlignError};
pub use builtin::BuiltinScorer;
pub use external::{ExternalConfig, ExternalScorer, Handshake, LogBase, PROTOCOL_VERSION};

use crate::suite::{Cell, TestSuite};

/// Surprisal of one scorer token, in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenScore {
    pub token: String,
    pub surprisal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredSentence {
    pub item_id: u32,
    pub condition: IndexMap<String, String>,
    #[serde(skip)]
    pub cell: Cell,
    pub text: String,
    pub token_scores: Vec<TokenScore>,
    pub region_surprisals: IndexMap<String, f64>,
}

impl ScoredSentence {
    pub fn total_token_surprisal(&self) -> f64 {
        self.token_scores.iter().map(|t| t.surprisal).sum()
    }

    pub fn total_region_surprisal(&self) -> f64 {
        self.region_surprisals.values().sum()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("scored sentence serializes")
    }
}

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("could not start scorer '{command}'")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("scorer sent no handshake within {0:?}")]
    HandshakeTimeout(std::time::Duration),
    #[error("scorer exited before completing the handshake{}", status_suffix(.status))]
    NoHandshake { status: Option<String> },
    #[error("bad scorer handshake: {0}")]
    BadHandshake(String),
    #[error("scorer speaks protocol {found}, expected {expected}")]
    Version { found: u64, expected: u64 },
    #[error("scorer protocol violation{}: {message}", sentence_suffix(.sentence))]
    Protocol {
        sentence: Option<String>,
        message: String,
    },
    #[error(
        "scorer died after {completed} of {total} sentences (last completed: {})",
        .last_completed.as_deref().unwrap_or("none")
    )]
    Died {
        completed: usize,
        total: usize,
        last_completed: Option<String>,
    },
    #[error("scorer timed out waiting for a response after {0:?}")]
    ResponseTimeout(std::time::Duration),
    #[error("alignment failed for {sentence}")]
    Alignment {
        sentence: String,
        #[source]
        source: AlignError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn status_suffix(status: &Option<String>) -> String {
    status.as_ref().map(|s| format!(" ({s})")).unwrap_or_default()
}

fn sentence_suffix(sentence: &Option<String>) -> String {
    sentence.as_ref().map(|s| format!(" for {s}")).unwrap_or_default()
}

/// Anything that turns sentences into per-token surprisals in bits.
pub trait Scorer {
    /// Short description recorded in run manifests.
    fn identity(&self) -> String;

    /// Continuation marker to strip before alignment, if the scorer uses one.
    fn piece_prefix(&self) -> Option<&str>;

    /// Score each text. The result has one entry per input, in input order,
    /// with no sentence-boundary padding tokens.
    fn score_batch(&mut self, texts: &[String]) -> Result<Vec<Vec<TokenScore>>, ScoringError>;
}

/// Score every sentence of a suite, ordered by item then condition.
pub fn score_suite(
    suite: &TestSuite,
    scorer: &mut dyn Scorer,
) -> Result<Vec<ScoredSentence>, ScoringError> {
    let entries: Vec<_> = suite
        .items
        .iter()
        .flat_map(|item| {
            item.sentences
                .iter()
                .map(move |(cell, sentence)| (item.item_id, cell, sentence))
        })
        .collect();
    let texts: Vec<String> = entries.iter().map(|(_, _, s)| s.surface()).collect();
    let scores = scorer.score_batch(&texts)?;
    if scores.len() != texts.len() {
        return Err(ScoringError::Protocol {
            sentence: None,
            message: format!("{} results for {} sentences", scores.len(), texts.len()),
        });
    }
    let prefix = scorer.piece_prefix().map(str::to_string);
    entries
        .into_iter()
        .zip(texts)
        .zip(scores)
        .map(|(((item_id, cell, sentence), text), token_scores)| {
            let region_surprisals = align_to_regions(sentence, &token_scores, prefix.as_deref())
                .map_err(|source| ScoringError::Alignment {
                    sentence: format!(
                        "item {item_id} [{}] \"{text}\"",
                        suite.condition_label(cell)
                    ),
                    source,
                })?;
            Ok(ScoredSentence {
                item_id,
                condition: suite.condition_map(cell),
                cell: cell.clone(),
                text,
                token_scores,
                region_surprisals,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ngram::{NGramModel, TrainConfig};
    use crate::suite::bundled;

    fn tiny_suite() -> TestSuite {
        let (template, _) = bundled::templates()
            .into_iter()
            .find(|(t, _)| t.name == "wh_island")
            .unwrap();
        let mut suite = template.expand_to_suite(2).unwrap();
        // keep only the control structure so the suite is a 2-item 2x2 design
        suite.factors.truncate(2);
        for item in &mut suite.items {
            item.sentences = item
                .sentences
                .iter()
                .filter(|(c, _)| c.0[2] == 0)
                .map(|(c, s)| (Cell(c.0[..2].to_vec()), s.clone()))
                .collect();
        }
        assert!(crate::suite::validate_suite(&suite).is_empty());
        suite
    }

    fn model() -> NGramModel {
        NGramModel::train_text(
            "i know who alex said your friend insulted yesterday\ni know that mary said the guests praised the chef",
            &TrainConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn cardinality_and_order() {
        let suite = tiny_suite();
        let mut scorer = BuiltinScorer::new(model());
        let scored = score_suite(&suite, &mut scorer).unwrap();
        assert_eq!(scored.len(), 8);
        assert_eq!(scored[0].item_id, 1);
        assert_eq!(scored[4].item_id, 2);
        assert_eq!(scored[0].condition["filler"], "yes");
        assert_eq!(scored[0].condition["gap"], "yes");
        assert_eq!(scored[3].condition["gap"], "no");
    }

    #[test]
    fn deterministic_and_conserving() {
        let suite = tiny_suite();
        let mut scorer = BuiltinScorer::new(model());
        let a = score_suite(&suite, &mut scorer).unwrap();
        let b = score_suite(&suite, &mut scorer).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.to_json_line(), y.to_json_line());
            assert!((x.total_region_surprisal() - x.total_token_surprisal()).abs() < 1e-6);
        }
    }
}
