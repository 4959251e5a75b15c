//! Byte-pair-merge vocabulary trainer.
//!
//! Words are the plain segments of the pre-tokenized corpus. Characters seen
//! fewer than `min_freq` times are left out of the alphabet and split words
//! around them. Merges repeatedly join the most frequent adjacent pair
//! (ties go to the lexicographically smallest `(left, right)`), stopping once
//! the vocabulary is full or the best pair occurs fewer than
//! `max(min_freq, 2)` times. Piece scores are smoothed log frequencies of
//! the pieces in the final segmentation of the training words.

use std::collections::{BTreeMap, HashMap};

use super::pretokenize::{pretokenize, SegmentKind};
use super::vocab::{SubwordVocabulary, NUM_SPECIAL};
use super::TokenizerError;

pub fn train_vocab<I, S>(
    corpus: I,
    target_size: usize,
    min_freq: u64,
) -> Result<SubwordVocabulary, TokenizerError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let min_freq = min_freq.max(1);
    let mut words: BTreeMap<String, u64> = BTreeMap::new();
    for text in corpus {
        let text = text.as_ref();
        for seg in pretokenize(text) {
            if seg.kind == SegmentKind::Plain {
                *words.entry(seg.text(text).to_string()).or_insert(0) += 1;
            }
        }
    }

    let mut char_freq: BTreeMap<char, u64> = BTreeMap::new();
    for (word, n) in &words {
        for c in word.chars() {
            *char_freq.entry(c).or_insert(0) += n;
        }
    }
    let alphabet: Vec<char> = char_freq
        .iter()
        .filter(|(_, n)| **n >= min_freq)
        .map(|(c, _)| *c)
        .collect();
    if alphabet.is_empty() {
        return Err(TokenizerError::Training(
            "no character reaches the minimum frequency".into(),
        ));
    }
    if target_size <= NUM_SPECIAL + alphabet.len() {
        return Err(TokenizerError::Training(format!(
            "target size {target_size} must exceed {} special tokens plus {} base characters",
            NUM_SPECIAL,
            alphabet.len()
        )));
    }

    let mut pieces: Vec<String> = alphabet.iter().map(|c| c.to_string()).collect();
    let mut piece_ids: HashMap<String, usize> =
        pieces.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();

    // Each training word as a sequence of piece indices, with its count.
    let mut seqs: Vec<(Vec<usize>, u64)> = Vec::new();
    for (word, n) in &words {
        let mut cur = Vec::new();
        for c in word.chars() {
            match piece_ids.get(c.encode_utf8(&mut [0; 4]) as &str) {
                Some(&id) => cur.push(id),
                None => {
                    if !cur.is_empty() {
                        seqs.push((std::mem::take(&mut cur), *n));
                    }
                }
            }
        }
        if !cur.is_empty() {
            seqs.push((cur, *n));
        }
    }

    let threshold = min_freq.max(2);
    while NUM_SPECIAL + pieces.len() < target_size {
        let mut pairs: HashMap<(usize, usize), u64> = HashMap::new();
        for (seq, n) in &seqs {
            for w in seq.windows(2) {
                *pairs.entry((w[0], w[1])).or_insert(0) += n;
            }
        }
        let best = pairs
            .iter()
            .filter(|(_, n)| **n >= threshold)
            .max_by(|(a, na), (b, nb)| {
                na.cmp(nb)
                    .then_with(|| (&pieces[b.0], &pieces[b.1]).cmp(&(&pieces[a.0], &pieces[a.1])))
            })
            .map(|(pair, _)| *pair);
        let Some((left, right)) = best else {
            break;
        };
        let merged = format!("{}{}", pieces[left], pieces[right]);
        let merged_id = match piece_ids.get(&merged) {
            Some(&id) => id,
            None => {
                pieces.push(merged.clone());
                piece_ids.insert(merged, pieces.len() - 1);
                pieces.len() - 1
            }
        };
        for (seq, _) in &mut seqs {
            let mut out = Vec::with_capacity(seq.len());
            let mut i = 0;
            while i < seq.len() {
                if i + 1 < seq.len() && seq[i] == left && seq[i + 1] == right {
                    out.push(merged_id);
                    i += 2;
                } else {
                    out.push(seq[i]);
                    i += 1;
                }
            }
            *seq = out;
        }
    }

    let mut counts = vec![0u64; pieces.len()];
    for (seq, n) in &seqs {
        for &id in seq {
            counts[id] += n;
        }
    }
    let total: u64 = counts.iter().sum();
    let denom = (total + pieces.len() as u64) as f64;
    let scored = pieces
        .into_iter()
        .zip(counts)
        .map(|(p, c)| (p, ((c + 1) as f64 / denom).ln()))
        .collect();
    SubwordVocabulary::new(scored)
}
