//! Brute-force reading of interpolated Kneser-Ney that rescans the padded
//! corpus for every quantity.

use std::collections::BTreeSet;

use gapscope_core::ngram::{BOS, EOS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DISCOUNT: f64 = 0.75;

pub fn corpus(seed: u64, types: usize, sentences: usize) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<String> = (0..types).map(|i| format!("w{i}")).collect();
    (0..sentences)
        .map(|_| {
            let len = rng.random_range(2..9);
            (0..len)
                .map(|_| {
                    // skewed towards low indices so some n-grams repeat
                    let a = rng.random_range(0..types);
                    let b = rng.random_range(0..types);
                    words[a.min(b)].clone()
                })
                .collect()
        })
        .collect()
}

pub struct Oracle {
    order: usize,
    padded: Vec<Vec<String>>,
    vocab_size: usize,
}

impl Oracle {
    pub fn new(sentences: &[Vec<String>], order: usize) -> Self {
        let padded = sentences
            .iter()
            .map(|s| {
                let mut p = vec![BOS.to_string(); order - 1];
                p.extend(s.iter().cloned());
                p.push(EOS.to_string());
                p
            })
            .collect();
        let distinct: BTreeSet<&String> = sentences.iter().flatten().collect();
        Self {
            order,
            padded,
            // words plus <unk> and </s>
            vocab_size: distinct.len() + 2,
        }
    }

    /// Every predicted position with the `j` symbols ending there.
    fn windows(&self, j: usize) -> Vec<&[String]> {
        let mut out = Vec::new();
        for p in &self.padded {
            for i in self.order - 1..p.len() {
                out.push(&p[i + 1 - j..=i]);
            }
        }
        out
    }

    /// Raw count at the top order; number of distinct left neighbours below.
    fn count(&self, gram: &[String]) -> f64 {
        let j = gram.len();
        if j == self.order {
            return self.windows(j).iter().filter(|w| **w == gram).count() as f64;
        }
        let mut left: BTreeSet<&String> = BTreeSet::new();
        for p in &self.padded {
            for i in self.order - 1..p.len() {
                if &p[i + 1 - j..=i] == gram {
                    left.insert(&p[i - j]);
                }
            }
        }
        left.len() as f64
    }

    pub fn prob(&self, history: &[String], word: &str) -> f64 {
        let mut p = 1.0 / self.vocab_size as f64;
        for j in 1..=self.order {
            let h = &history[history.len() - (j - 1)..];
            let followers: BTreeSet<&String> = self
                .windows(j)
                .into_iter()
                .filter(|w| &w[..j - 1] == h)
                .map(|w| &w[j - 1])
                .collect();
            if followers.is_empty() {
                continue;
            }
            let total: f64 = followers
                .iter()
                .map(|f| {
                    let mut g = h.to_vec();
                    g.push((*f).clone());
                    self.count(&g)
                })
                .sum();
            let mut g = h.to_vec();
            g.push(word.to_string());
            let c = self.count(&g);
            p = ((c - DISCOUNT).max(0.0) + DISCOUNT * followers.len() as f64 * p) / total;
        }
        p
    }
}

/// Contexts of length `order - 1`: half taken from the corpus, half random.
pub fn contexts(sentences: &[Vec<String>], order: usize, n: usize, seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<String> = sentences
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    (0..n)
        .map(|i| {
            if i % 2 == 0 {
                let s = &sentences[rng.random_range(0..sentences.len())];
                let mut padded = vec![BOS.to_string(); order - 1];
                padded.extend(s.iter().cloned());
                let end = rng.random_range(order - 1..=padded.len());
                padded[end + 1 - order..end].to_vec()
            } else {
                (0..order - 1)
                    .map(|_| words[rng.random_range(0..words.len())].clone())
                    .collect()
            }
        })
        .collect()
}

