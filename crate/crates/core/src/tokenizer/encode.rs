//! Viterbi segmentation, encoding and decoding.

use std::cmp::Ordering;

use super::pretokenize::{pretokenize, SegmentKind};
use super::vocab::{Special, SubwordVocabulary};
use super::TokenizerError;

/// Token ids with the byte span each one covers in the encoded text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenSequence {
    pub ids: Vec<u32>,
    pub offsets: Vec<(usize, usize)>,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    fn push(&mut self, id: u32, start: usize, end: usize) {
        self.ids.push(id);
        self.offsets.push((start, end));
    }
}

const REMOVED: &str = "<|removed|>";

/// Encodes `text`: whitespace segments map to their special tokens, literal
/// `<|removed|>` placeholders map to the placeholder token, and the rest of
/// each plain segment is split by [`viterbi`].
pub fn encode(text: &str, vocab: &SubwordVocabulary) -> TokenSequence {
    let mut seq = TokenSequence::default();
    for seg in pretokenize(text) {
        match seg.kind {
            SegmentKind::Whitespace(w) => seq.push(w.id(), seg.start, seg.end),
            SegmentKind::Plain => {
                let plain = seg.text(text);
                let mut pos = 0;
                while let Some(found) = plain[pos..].find(REMOVED) {
                    let at = pos + found;
                    encode_plain(&plain[pos..at], seg.start + pos, vocab, &mut seq);
                    seq.push(Special::Removed.id(), seg.start + at, seg.start + at + REMOVED.len());
                    pos = at + REMOVED.len();
                }
                encode_plain(&plain[pos..], seg.start + pos, vocab, &mut seq);
            }
        }
    }
    seq
}

fn encode_plain(text: &str, base: usize, vocab: &SubwordVocabulary, seq: &mut TokenSequence) {
    for (id, start, end) in viterbi(text, vocab) {
        seq.push(id, base + start, base + end);
    }
}

#[derive(Clone, Copy)]
struct Best {
    score: f64,
    pieces: usize,
    /// Char index where the first piece ends; `usize::MAX` for the empty suffix.
    next: usize,
    id: u32,
}

/// Maximum-score segmentation of a whitespace-free string.
///
/// Scores are summed unigram log-probabilities. Among equal scores the
/// segmentation with fewer pieces wins, then the one whose first piece is
/// lexicographically smallest, applied recursively to the remainder.
/// A character not covered by any single-character piece may be emitted as
/// `<unk>` at a score ten below the lowest piece score.
///
/// Returns `(id, byte_start, byte_end)` triples relative to `text`.
pub fn viterbi(text: &str, vocab: &SubwordVocabulary) -> Vec<(u32, usize, usize)> {
    let bounds: Vec<usize> = text
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(text.len()))
        .collect();
    let n = bounds.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let max_len = vocab.max_piece_chars().max(1);
    let mut best: Vec<Option<Best>> = vec![None; n + 1];
    best[n] = Some(Best {
        score: 0.0,
        pieces: 0,
        next: usize::MAX,
        id: 0,
    });
    for i in (0..n).rev() {
        let mut winner: Option<(Best, &str)> = None;
        let mut single_char_known = false;
        for j in i + 1..=(i + max_len).min(n) {
            let piece = &text[bounds[i]..bounds[j]];
            let Some(id) = vocab.piece_id(piece) else {
                continue;
            };
            single_char_known |= j == i + 1;
            let rest = best[j].expect("suffixes are always segmentable");
            let cand = Best {
                score: vocab.piece_score(id) + rest.score,
                pieces: rest.pieces + 1,
                next: j,
                id,
            };
            pick(&mut winner, cand, piece);
        }
        if !single_char_known {
            let rest = best[i + 1].expect("suffixes are always segmentable");
            let cand = Best {
                score: vocab.unk_score() + rest.score,
                pieces: rest.pieces + 1,
                next: i + 1,
                id: Special::Unk.id(),
            };
            pick(&mut winner, cand, &text[bounds[i]..bounds[i + 1]]);
        }
        best[i] = winner.map(|(b, _)| b);
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let b = best[i].expect("filled above");
        out.push((b.id, bounds[i], bounds[b.next]));
        i = b.next;
    }
    out
}

fn pick<'a>(winner: &mut Option<(Best, &'a str)>, cand: Best, first: &'a str) {
    let better = match winner {
        None => true,
        Some((w, wfirst)) => match cand.score.partial_cmp(&w.score) {
            Some(Ordering::Greater) => true,
            Some(Ordering::Less) => false,
            _ => match cand.pieces.cmp(&w.pieces) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => first < *wfirst,
            },
        },
    };
    if better {
        *winner = Some((cand, first));
    }
}

/// Decodes ids to text. Inverse of [`encode`] on text without unknown
/// characters; `<unk>` decodes to U+FFFD.
pub fn decode(ids: &[u32], vocab: &SubwordVocabulary) -> Result<String, TokenizerError> {
    let mut out = String::new();
    for &id in ids {
        out.push_str(&token_text(id, vocab)?);
    }
    Ok(out)
}

/// Decodes a sequence produced by [`encode`] on `source`, restoring the
/// original bytes of `<unk>` tokens from their offsets.
pub fn decode_with_source(
    seq: &TokenSequence,
    source: &str,
    vocab: &SubwordVocabulary,
) -> Result<String, TokenizerError> {
    let mut out = String::new();
    for (i, &id) in seq.ids.iter().enumerate() {
        if id == Special::Unk.id() {
            if let Some(text) = seq.offsets.get(i).and_then(|&(s, e)| source.get(s..e)) {
                out.push_str(text);
                continue;
            }
        }
        out.push_str(&token_text(id, vocab)?);
    }
    Ok(out)
}

fn token_text(id: u32, vocab: &SubwordVocabulary) -> Result<String, TokenizerError> {
    if let Some(special) = Special::from_id(id) {
        return Ok(special.decoded());
    }
    vocab.token_str(id).ok_or(TokenizerError::UnknownId(id))
}
