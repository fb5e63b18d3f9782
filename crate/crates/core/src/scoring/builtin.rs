use std::sync::Arc;

use super::{Scorer, ScoringError, TokenScore};
use crate::exec::Exec;
use crate::ngram::NGramModel;

/// Scores whitespace tokens with the built-in n-gram model. Sentences are
/// scored independently, in parallel when the `parallel` feature is on.
#[derive(Debug, Clone)]
pub struct BuiltinScorer {
    model: Arc<NGramModel>,
    exec: Exec,
}

impl BuiltinScorer {
    pub fn new(model: NGramModel) -> Self {
        Self::shared(Arc::new(model))
    }

    pub fn shared(model: Arc<NGramModel>) -> Self {
        Self {
            model,
            exec: Exec::default(),
        }
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn model(&self) -> &NGramModel {
        &self.model
    }

    pub fn score_text(&self, text: &str) -> Vec<TokenScore> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let mut scored = self.model.score_sentence(&tokens);
        // drop </s>: no region covers it
        scored.pop();
        scored
            .into_iter()
            .map(|(token, surprisal)| TokenScore { token, surprisal })
            .collect()
    }
}

impl Scorer for BuiltinScorer {
    fn identity(&self) -> String {
        format!(
            "builtin:kneser-ney order={} discount={}",
            self.model.order(),
            self.model.discounts()[0]
        )
    }

    fn piece_prefix(&self) -> Option<&str> {
        None
    }

    fn score_batch(&mut self, texts: &[String]) -> Result<Vec<Vec<TokenScore>>, ScoringError> {
        Ok(self.exec.map(texts, |t| self.score_text(t)))
    }
}
