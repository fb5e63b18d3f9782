//! Interpolated Kneser-Ney n-gram language model.
//!
//! The highest order uses raw counts; every lower order uses continuation
//! counts (the number of distinct left extensions of a gram). Each order
//! interpolates with the one below using a fixed absolute discount, and the
//! recursion bottoms out at a uniform distribution over the predictable
//! vocabulary (every word, `<unk>` and `</s>`, but not `<s>`).

mod io;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::MAGIC;

pub type TokenId = u32;

pub const UNK: &str = "<unk>";
pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

pub const UNK_ID: TokenId = 0;
pub const BOS_ID: TokenId = 1;
pub const EOS_ID: TokenId = 2;

#[derive(Debug, Error)]
pub enum NgramError {
    #[error("training corpus contains no tokens")]
    EmptyCorpus,
    #[error("discount must lie strictly between 0 and 1, got {0}")]
    InvalidDiscount(f64),
    #[error("model order must be at least 1")]
    InvalidOrder,
    #[error("not a gapscope n-gram model (bad magic bytes)")]
    BadMagic,
    #[error("unsupported model file version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("model file is truncated")]
    Truncated,
    #[error("model file is corrupt: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Token normalization applied before vocabulary lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalizer {
    #[default]
    Lowercase,
    Identity,
}

impl Normalizer {
    pub fn apply(self, token: &str) -> String {
        match self {
            Normalizer::Lowercase => token.to_lowercase(),
            Normalizer::Identity => token.to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub order: usize,
    pub discount: f64,
    pub min_count: u64,
    pub normalizer: Normalizer,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            order: 3,
            discount: 0.75,
            min_count: 1,
            normalizer: Normalizer::Lowercase,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct ContextStats {
    total: u64,
    types: u64,
}

#[derive(Debug, Clone)]
pub struct NGramModel {
    order: usize,
    discounts: Vec<f64>,
    normalizer: Normalizer,
    vocab: Vec<String>,
    index: HashMap<String, TokenId>,
    /// `counts[k - 1]`: k-gram to count. Raw counts at the top order,
    /// continuation counts below it.
    counts: Vec<HashMap<Vec<TokenId>, u64>>,
    /// `contexts[k - 1]`: (k-1)-gram history to summed count and number of
    /// distinct followers at order k.
    contexts: Vec<HashMap<Vec<TokenId>, ContextStats>>,
}

impl NGramModel {
    /// Train on whitespace-tokenized text, one sentence per line.
    pub fn train_text(text: &str, config: &TrainConfig) -> Result<Self, NgramError> {
        let sentences: Vec<Vec<&str>> = text
            .lines()
            .map(|l| l.split_whitespace().collect())
            .collect();
        Self::train(&sentences, config)
    }

    pub fn train<S: AsRef<str>>(
        sentences: &[Vec<S>],
        config: &TrainConfig,
    ) -> Result<Self, NgramError> {
        if config.order == 0 {
            return Err(NgramError::InvalidOrder);
        }
        if !(config.discount > 0.0 && config.discount < 1.0) {
            return Err(NgramError::InvalidDiscount(config.discount));
        }
        let normalized: Vec<Vec<String>> = sentences
            .iter()
            .map(|s| s.iter().map(|t| config.normalizer.apply(t.as_ref())).collect())
            .filter(|s: &Vec<String>| !s.is_empty())
            .collect();
        if normalized.is_empty() {
            return Err(NgramError::EmptyCorpus);
        }

        let mut freq: HashMap<&str, u64> = HashMap::new();
        for token in normalized.iter().flatten() {
            *freq.entry(token.as_str()).or_default() += 1;
        }
        let mut words: Vec<&str> = freq
            .iter()
            .filter(|(w, &c)| c >= config.min_count && ![UNK, BOS, EOS].contains(w))
            .map(|(w, _)| *w)
            .collect();
        words.sort_unstable();
        let vocab: Vec<String> = [UNK, BOS, EOS]
            .into_iter()
            .chain(words)
            .map(str::to_string)
            .collect();

        let n = config.order;
        let mut model = Self::empty(n, vec![config.discount; n], config.normalizer, vocab);
        let top = &mut model.counts[n - 1];
        for sentence in &normalized {
            let mut padded = vec![BOS_ID; n - 1];
            padded.extend(sentence.iter().map(|t| model.index.get(t).copied().unwrap_or(UNK_ID)));
            padded.push(EOS_ID);
            for window in padded.windows(n) {
                *top.entry(window.to_vec()).or_default() += 1;
            }
        }
        model.derive_lower_orders();
        model.derive_contexts();
        Ok(model)
    }

    fn empty(order: usize, discounts: Vec<f64>, normalizer: Normalizer, vocab: Vec<String>) -> Self {
        let index = vocab
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as TokenId))
            .collect();
        Self {
            order,
            discounts,
            normalizer,
            vocab,
            index,
            counts: vec![HashMap::new(); order],
            contexts: vec![HashMap::new(); order],
        }
    }

    fn derive_lower_orders(&mut self) {
        for k in (1..self.order).rev() {
            let mut lower: HashMap<Vec<TokenId>, u64> = HashMap::new();
            for gram in self.counts[k].keys() {
                *lower.entry(gram[1..].to_vec()).or_default() += 1;
            }
            self.counts[k - 1] = lower;
        }
    }

    fn derive_contexts(&mut self) {
        for k in 1..=self.order {
            let mut ctx: HashMap<Vec<TokenId>, ContextStats> = HashMap::new();
            for (gram, &count) in &self.counts[k - 1] {
                let stats = ctx.entry(gram[..k - 1].to_vec()).or_default();
                stats.total += count;
                stats.types += 1;
            }
            self.contexts[k - 1] = ctx;
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn discounts(&self) -> &[f64] {
        &self.discounts
    }

    pub fn normalizer(&self) -> Normalizer {
        self.normalizer
    }

    /// Every symbol, including `<s>`.
    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    /// Symbols that can be predicted: the vocabulary minus `<s>`.
    pub fn predictable(&self) -> impl Iterator<Item = &str> {
        self.vocab
            .iter()
            .enumerate()
            .filter(|(i, _)| *i as TokenId != BOS_ID)
            .map(|(_, w)| w.as_str())
    }

    pub fn predictable_size(&self) -> usize {
        self.vocab.len() - 1
    }

    /// Map a surface token to its id; unknown words become `<unk>`.
    pub fn token_id(&self, token: &str) -> TokenId {
        match token {
            UNK => UNK_ID,
            BOS => BOS_ID,
            EOS => EOS_ID,
            _ => self
                .index
                .get(&self.normalizer.apply(token))
                .copied()
                .unwrap_or(UNK_ID),
        }
    }

    /// Interpolated probability of `word` after `context`. The context is
    /// left-padded with `<s>` to `order - 1` symbols.
    pub fn cond_prob<S: AsRef<str>>(&self, context: &[S], word: &str) -> f64 {
        let history = self.padded_history(context.iter().map(|t| self.token_id(t.as_ref())));
        self.prob_ids(&history, self.token_id(word))
    }

    fn padded_history(&self, ids: impl Iterator<Item = TokenId>) -> Vec<TokenId> {
        let mut history = vec![BOS_ID; self.order.saturating_sub(1)];
        history.extend(ids);
        let keep = self.order - 1;
        history.split_off(history.len() - keep)
    }

    /// Probability given exactly `order - 1` history ids.
    pub fn prob_ids(&self, history: &[TokenId], word: TokenId) -> f64 {
        debug_assert_eq!(history.len(), self.order - 1);
        let mut prob = 1.0 / self.predictable_size() as f64;
        let mut key = Vec::with_capacity(self.order);
        for k in 1..=self.order {
            let ctx = &history[history.len() - (k - 1)..];
            if let Some(stats) = self.contexts[k - 1].get(ctx) {
                key.clear();
                key.extend_from_slice(ctx);
                key.push(word);
                let count = self.counts[k - 1].get(key.as_slice()).copied().unwrap_or(0);
                let d = self.discounts[k - 1];
                let discounted = (count as f64 - d).max(0.0);
                prob = (discounted + d * stats.types as f64 * prob) / stats.total as f64;
            }
        }
        prob
    }

    /// Surprisal in bits of every token plus the closing `</s>`. The `<s>`
    /// padding is conditioned on but never scored.
    pub fn score_sentence<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<(String, f64)> {
        let mut history = vec![BOS_ID; self.order - 1];
        let mut out = Vec::with_capacity(tokens.len() + 1);
        let ids = tokens
            .iter()
            .map(|t| (t.as_ref().to_string(), self.token_id(t.as_ref())))
            .chain(std::iter::once((EOS.to_string(), EOS_ID)));
        for (surface, id) in ids {
            let p = self.prob_ids(&history, id);
            out.push((surface, surprisal_bits(p)));
            if self.order > 1 {
                history.remove(0);
                history.push(id);
            }
        }
        out
    }

    /// Per-token perplexity over the given sentences, counting `</s>`.
    pub fn perplexity<S: AsRef<str>>(&self, sentences: &[Vec<S>]) -> f64 {
        let (bits, tokens) = sentences
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| self.score_sentence(s))
            .fold((0.0, 0usize), |(b, n), scored| {
                (b + scored.iter().map(|(_, s)| s).sum::<f64>(), n + scored.len())
            });
        if tokens == 0 {
            return f64::NAN;
        }
        (bits / tokens as f64).exp2()
    }

    pub fn save(&self) -> Vec<u8> {
        io::encode(self)
    }

    pub fn load(bytes: &[u8]) -> Result<Self, NgramError> {
        io::decode(bytes)
    }
}

/// `-log2 p`, clamped at zero against rounding just above one.
pub fn surprisal_bits(p: f64) -> f64 {
    (-p.log2()).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(order: usize) -> TrainConfig {
        TrainConfig {
            order,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn degenerate_unigram() {
        let m = NGramModel::train_text("a a a", &cfg(1)).unwrap();
        // predictable = {<unk>, </s>, a}; counts a:3, </s>:1
        let v = 3.0;
        let d = 0.75;
        let expect_a = (3.0 - d + d * 2.0 / v) / 4.0;
        assert!((m.cond_prob::<&str>(&[], "a") - expect_a).abs() < 1e-15);
        let total: f64 = m.predictable().map(|w| m.cond_prob::<&str>(&[], w)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(m.cond_prob::<&str>(&[], UNK) > 0.0);
    }

    #[test]
    fn hapax_maps_to_unk() {
        let c = TrainConfig {
            min_count: 2,
            ..cfg(2)
        };
        let m = NGramModel::train_text("the dog ran\nthe cat ran\nthe dog sat", &c).unwrap();
        assert_eq!(m.token_id("cat"), UNK_ID);
        assert_eq!(m.token_id("sat"), UNK_ID);
        assert_ne!(m.token_id("dog"), UNK_ID);
        assert_eq!(
            m.cond_prob(&["the"], "cat").to_bits(),
            m.cond_prob(&["the"], "zebra").to_bits()
        );
    }

    #[test]
    fn rejects_bad_config() {
        assert!(matches!(
            NGramModel::train_text("", &cfg(2)),
            Err(NgramError::EmptyCorpus)
        ));
        let bad = TrainConfig {
            discount: 1.0,
            ..cfg(2)
        };
        assert!(matches!(
            NGramModel::train_text("a b", &bad),
            Err(NgramError::InvalidDiscount(_))
        ));
        assert!(matches!(
            NGramModel::train_text("a b", &cfg(0)),
            Err(NgramError::InvalidOrder)
        ));
    }

    #[test]
    fn lowercases_by_default() {
        let m = NGramModel::train_text("The dog", &cfg(2)).unwrap();
        assert_eq!(m.token_id("THE"), m.token_id("the"));
    }

    #[test]
    fn strongly_predicted_follower_wins() {
        let corpus = "i know who left\nwho left early\nsomeone who left\nthey saw who left\nwe ran home\nthey left home";
        let m = NGramModel::train_text(corpus, &cfg(2)).unwrap();
        let best = m.cond_prob(&["who"], "left");
        for w in m.predictable().filter(|w| *w != "left") {
            assert!(best > m.cond_prob(&["who"], w), "{w}");
        }
    }

    #[test]
    fn scores_eos_but_not_bos() {
        let m = NGramModel::train_text("a b\nb a", &cfg(3)).unwrap();
        let scored = m.score_sentence(&["a", "b"]);
        assert_eq!(scored.len(), 3);
        assert_eq!(scored[2].0, EOS);
        assert!(scored.iter().all(|(_, s)| *s >= 0.0 && s.is_finite()));
    }
}
