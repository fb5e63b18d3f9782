//! Token-to-region alignment.
//!
//! Scorer tokens are matched against the sentence surface with whitespace
//! ignored on both sides, after stripping the scorer's declared piece marker.
//! Each token must fall inside exactly one region; its surprisal is added to
//! that region's total.

use indexmap::IndexMap;
use thiserror::Error;

use super::TokenScore;
use crate::suite::RegionedSentence;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlignError {
    #[error(
        "token {token_index} ('{token}') does not match the sentence at byte {offset}: \
         expected '{expected}'"
    )]
    Mismatch {
        token_index: usize,
        token: String,
        offset: usize,
        expected: String,
    },
    #[error("tokens end at byte {offset} but the sentence continues: '{remaining}'")]
    Incomplete { offset: usize, remaining: String },
    #[error(
        "token {token_index} ('{token}') spans bytes {start}..{end}, straddling regions {regions:?}"
    )]
    Straddle {
        token_index: usize,
        token: String,
        start: usize,
        end: usize,
        regions: Vec<String>,
    },
}

/// Strip a continuation marker and drop whitespace from a scorer token.
pub fn normalize_piece(token: &str, piece_prefix: Option<&str>) -> String {
    let stripped = match piece_prefix {
        Some(prefix) if !prefix.is_empty() => token.strip_prefix(prefix).unwrap_or(token),
        _ => token,
    };
    stripped.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Sum token surprisals per region. Every region of the sentence appears in
/// the result, empty ones with 0 bits.
pub fn align_to_regions(
    sentence: &RegionedSentence,
    tokens: &[TokenScore],
    piece_prefix: Option<&str>,
) -> Result<IndexMap<String, f64>, AlignError> {
    let surface = sentence.surface();
    let spans = sentence.spans();
    let chars: Vec<(usize, char)> = surface
        .char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .collect();
    let offset_at = |pos: usize| chars.get(pos).map_or(surface.len(), |(o, _)| *o);

    let mut sums: IndexMap<String, f64> = sentence
        .regions
        .iter()
        .map(|r| (r.name.clone(), 0.0))
        .collect();
    let containing = |start: usize, end: usize| {
        spans
            .iter()
            .position(|&(s, e)| s < e && s <= start && end <= e)
    };

    let mut pos = 0usize;
    for (index, token) in tokens.iter().enumerate() {
        let piece = normalize_piece(&token.token, piece_prefix);
        let start_pos = pos;
        for c in piece.chars() {
            match chars.get(pos) {
                Some(&(_, expected)) if expected == c => pos += 1,
                _ => {
                    let offset = offset_at(pos);
                    return Err(AlignError::Mismatch {
                        token_index: index,
                        token: token.token.clone(),
                        offset,
                        expected: surface[offset..].chars().take(24).collect(),
                    });
                }
            }
        }

        let region = if pos == start_pos {
            // Zero-width piece: charge it to the region holding the next character.
            let at = offset_at(pos);
            containing(at, at + 1)
                .or_else(|| spans.iter().rposition(|&(s, e)| s < e))
                .expect("sentence has a nonempty region")
        } else {
            let (start, last) = (chars[start_pos], chars[pos - 1]);
            let end = last.0 + last.1.len_utf8();
            containing(start.0, end).ok_or_else(|| AlignError::Straddle {
                token_index: index,
                token: token.token.clone(),
                start: start.0,
                end,
                regions: sentence
                    .regions
                    .iter()
                    .zip(&spans)
                    .filter(|(_, &(s, e))| s < e && s < end && start.0 < e)
                    .map(|(r, _)| r.name.clone())
                    .collect(),
            })?
        };
        sums[region] += token.surprisal;
    }
    if pos < chars.len() {
        let offset = offset_at(pos);
        return Err(AlignError::Incomplete {
            offset,
            remaining: surface[offset..].to_string(),
        });
    }
    Ok(sums)
}
