//! Binary model file.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic      8 bytes  "GSNGRAM\0"
//! version    u32
//! order      u32
//! normalizer u8       0 = lowercase, 1 = identity
//! discounts  order x f64
//! vocab      u32 count, then per entry u32 byte length + UTF-8
//! per order k = 1..=order:
//!            u64 entry count, then per entry k x u32 ids + u64 count
//! ```
//!
//! Entries are sorted by id sequence so equal models give equal bytes.

use super::{NGramModel, NgramError, Normalizer, TokenId, BOS, EOS, UNK};

pub const MAGIC: &[u8; 8] = b"GSNGRAM\0";
const VERSION: u32 = 1;

pub(super) fn encode(model: &NGramModel) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(model.order as u32).to_le_bytes());
    out.push(match model.normalizer {
        Normalizer::Lowercase => 0,
        Normalizer::Identity => 1,
    });
    for d in &model.discounts {
        out.extend_from_slice(&d.to_le_bytes());
    }
    out.extend_from_slice(&(model.vocab.len() as u32).to_le_bytes());
    for word in &model.vocab {
        out.extend_from_slice(&(word.len() as u32).to_le_bytes());
        out.extend_from_slice(word.as_bytes());
    }
    for table in &model.counts {
        let mut entries: Vec<_> = table.iter().collect();
        entries.sort_unstable();
        out.extend_from_slice(&(entries.len() as u64).to_le_bytes());
        for (gram, count) in entries {
            for id in gram {
                out.extend_from_slice(&id.to_le_bytes());
            }
            out.extend_from_slice(&count.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], NgramError> {
        if self.bytes.len() < n {
            return Err(NgramError::Truncated);
        }
        let (head, rest) = self.bytes.split_at(n);
        self.bytes = rest;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8, NgramError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, NgramError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, NgramError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, NgramError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub(super) fn decode(bytes: &[u8]) -> Result<NGramModel, NgramError> {
    let mut r = Reader { bytes };
    if bytes.len() < MAGIC.len() {
        return Err(if MAGIC.starts_with(bytes) {
            NgramError::Truncated
        } else {
            NgramError::BadMagic
        });
    }
    if r.take(MAGIC.len())? != MAGIC {
        return Err(NgramError::BadMagic);
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(NgramError::Version {
            found: version,
            expected: VERSION,
        });
    }
    let order = r.u32()? as usize;
    if order == 0 {
        return Err(NgramError::Corrupt("order 0".into()));
    }
    let normalizer = match r.u8()? {
        0 => Normalizer::Lowercase,
        1 => Normalizer::Identity,
        other => return Err(NgramError::Corrupt(format!("normalizer tag {other}"))),
    };
    let discounts = (0..order).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
    if discounts.iter().any(|d| !(*d > 0.0 && *d < 1.0)) {
        return Err(NgramError::Corrupt("discount outside (0, 1)".into()));
    }
    let vocab_len = r.u32()? as usize;
    let mut vocab = Vec::with_capacity(vocab_len.min(1 << 20));
    for _ in 0..vocab_len {
        let len = r.u32()? as usize;
        let word = std::str::from_utf8(r.take(len)?)
            .map_err(|e| NgramError::Corrupt(e.to_string()))?;
        vocab.push(word.to_string());
    }
    if vocab.len() < 3 || vocab[..3] != [UNK, BOS, EOS] {
        return Err(NgramError::Corrupt("reserved symbols missing".into()));
    }

    let mut model = NGramModel::empty(order, discounts, normalizer, vocab);
    for k in 1..=order {
        let entries = r.u64()?;
        let table = &mut model.counts[k - 1];
        for _ in 0..entries {
            let gram = (0..k)
                .map(|_| r.u32())
                .collect::<Result<Vec<TokenId>, _>>()?;
            if gram.iter().any(|&id| id as usize >= model.vocab.len()) {
                return Err(NgramError::Corrupt("token id out of range".into()));
            }
            let count = r.u64()?;
            if count == 0 {
                return Err(NgramError::Corrupt("zero count".into()));
            }
            table.insert(gram, count);
        }
    }
    if !r.bytes.is_empty() {
        return Err(NgramError::Corrupt("trailing bytes".into()));
    }
    if model.counts[0].is_empty() {
        return Err(NgramError::Corrupt("empty unigram table".into()));
    }
    model.derive_contexts();
    Ok(model)
}
