//! Scored subword vocabulary and its text file format.
//!
//! ```text
//! ECVOCAB 1
//! <piece>\t<score>
//! ...
//! [special]
//! <special token surface, one per line, canonical order>
//! ```
//!
//! Newlines, tabs and backslashes inside pieces are written as `\n`, `\t`
//! and `\\`. Special tokens take ids `0..NUM_SPECIAL` in canonical order and
//! pieces follow in file order.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use super::TokenizerError;

pub const VOCAB_HEADER: &str = "ECVOCAB 1";
pub const SPECIAL_SECTION: &str = "[special]";
pub const NUM_SENTINELS: usize = 100;
/// Ten fixed tokens followed by the sentinels.
pub const NUM_SPECIAL: usize = 10 + NUM_SENTINELS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Special {
    Pad,
    Eos,
    Unk,
    Sep,
    Removed,
    Space1,
    Space2,
    Space4,
    Tab,
    Newline,
    Sentinel(u8),
}

impl Special {
    pub fn id(self) -> u32 {
        match self {
            Special::Pad => 0,
            Special::Eos => 1,
            Special::Unk => 2,
            Special::Sep => 3,
            Special::Removed => 4,
            Special::Space1 => 5,
            Special::Space2 => 6,
            Special::Space4 => 7,
            Special::Tab => 8,
            Special::Newline => 9,
            Special::Sentinel(k) => 10 + u32::from(k),
        }
    }

    pub fn from_id(id: u32) -> Option<Special> {
        Some(match id {
            0 => Special::Pad,
            1 => Special::Eos,
            2 => Special::Unk,
            3 => Special::Sep,
            4 => Special::Removed,
            5 => Special::Space1,
            6 => Special::Space2,
            7 => Special::Space4,
            8 => Special::Tab,
            9 => Special::Newline,
            k if (k as usize) < NUM_SPECIAL => Special::Sentinel((k - 10) as u8),
            _ => return None,
        })
    }

    /// Name used in the vocabulary file.
    pub fn surface(self) -> String {
        match self {
            Special::Pad => "<pad>".into(),
            Special::Eos => "</s>".into(),
            Special::Unk => "<unk>".into(),
            Special::Sep => "<SEP>".into(),
            Special::Removed => "<|removed|>".into(),
            Special::Space1 => "<space*1>".into(),
            Special::Space2 => "<space*2>".into(),
            Special::Space4 => "<space*4>".into(),
            Special::Tab => "\t".into(),
            Special::Newline => "\n".into(),
            Special::Sentinel(k) => format!("<extra_id_{k}>"),
        }
    }

    /// Text a decoder emits for this token. Padding and end-of-sequence
    /// render as nothing; the unknown token renders as U+FFFD.
    pub fn decoded(self) -> String {
        match self {
            Special::Pad | Special::Eos => String::new(),
            Special::Unk => "\u{FFFD}".into(),
            Special::Space1 => " ".into(),
            Special::Space2 => "  ".into(),
            Special::Space4 => "    ".into(),
            other => other.surface(),
        }
    }

    pub fn canonical() -> impl Iterator<Item = Special> {
        (0..NUM_SPECIAL as u32).map(|id| Special::from_id(id).expect("dense ids"))
    }
}

impl fmt::Display for Special {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&escape(&self.surface()))
    }
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape(s: &str) -> Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            other => return Err(format!("bad escape \\{}", other.map(String::from).unwrap_or_default())),
        }
    }
    Ok(out)
}

/// Immutable vocabulary: special tokens plus scored pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct SubwordVocabulary {
    pieces: Vec<(String, f64)>,
    index: HashMap<String, u32>,
    max_piece_chars: usize,
    unk_score: f64,
}

impl SubwordVocabulary {
    pub fn new(pieces: Vec<(String, f64)>) -> Result<Self, TokenizerError> {
        let mut index = HashMap::with_capacity(pieces.len());
        let mut max_piece_chars = 0;
        for (i, (piece, score)) in pieces.iter().enumerate() {
            if piece.is_empty() || piece.contains([' ', '\t', '\n']) {
                return Err(TokenizerError::InvalidVocab(format!(
                    "piece {:?} is empty or contains whitespace",
                    piece
                )));
            }
            if !score.is_finite() {
                return Err(TokenizerError::InvalidVocab(format!(
                    "piece {:?} has non-finite score",
                    piece
                )));
            }
            if index
                .insert(piece.clone(), (NUM_SPECIAL + i) as u32)
                .is_some()
            {
                return Err(TokenizerError::InvalidVocab(format!(
                    "duplicate piece {:?}",
                    piece
                )));
            }
            max_piece_chars = max_piece_chars.max(piece.chars().count());
        }
        let min_score = pieces
            .iter()
            .map(|(_, s)| *s)
            .fold(f64::INFINITY, f64::min);
        let unk_score = if min_score.is_finite() { min_score - 10.0 } else { -10.0 };
        Ok(Self {
            pieces,
            index,
            max_piece_chars,
            unk_score,
        })
    }

    /// Total number of ids, specials included.
    pub fn len(&self) -> usize {
        NUM_SPECIAL + self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn pieces(&self) -> &[(String, f64)] {
        &self.pieces
    }

    pub fn piece_id(&self, piece: &str) -> Option<u32> {
        self.index.get(piece).copied()
    }

    pub fn contains(&self, piece: &str) -> bool {
        self.index.contains_key(piece)
    }

    pub fn special(&self, special: Special) -> u32 {
        special.id()
    }

    pub fn sentinel(&self, k: usize) -> Option<u32> {
        (k < NUM_SENTINELS).then(|| Special::Sentinel(k as u8).id())
    }

    pub fn eos(&self) -> u32 {
        Special::Eos.id()
    }

    pub fn is_sentinel(&self, id: u32) -> Option<usize> {
        match Special::from_id(id) {
            Some(Special::Sentinel(k)) => Some(k as usize),
            _ => None,
        }
    }

    pub(crate) fn piece_score(&self, id: u32) -> f64 {
        self.pieces[id as usize - NUM_SPECIAL].1
    }

    pub(crate) fn max_piece_chars(&self) -> usize {
        self.max_piece_chars
    }

    pub(crate) fn unk_score(&self) -> f64 {
        self.unk_score
    }

    /// Surface string of a token as written in the vocabulary.
    pub fn token_str(&self, id: u32) -> Option<String> {
        match Special::from_id(id) {
            Some(s) => Some(s.surface()),
            None => self
                .pieces
                .get(id as usize - NUM_SPECIAL)
                .map(|(p, _)| p.clone()),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(VOCAB_HEADER);
        out.push('\n');
        for (piece, score) in &self.pieces {
            out.push_str(&escape(piece));
            out.push('\t');
            out.push_str(&format!("{score:?}"));
            out.push('\n');
        }
        out.push_str(SPECIAL_SECTION);
        out.push('\n');
        for s in Special::canonical() {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, TokenizerError> {
        let bad = |line: usize, msg: String| TokenizerError::InvalidVocab(format!("line {line}: {msg}"));
        // Pieces may contain '\r', so split on '\n' only.
        let body = text.strip_suffix('\n').unwrap_or(text);
        let mut lines = body.split('\n').enumerate();
        match lines.next() {
            Some((_, VOCAB_HEADER)) => {}
            _ => return Err(bad(1, format!("expected header {VOCAB_HEADER:?}"))),
        }
        let mut pieces = Vec::new();
        let mut in_special = false;
        let mut specials = Special::canonical();
        for (i, line) in lines {
            let line_no = i + 1;
            if !in_special {
                if line == SPECIAL_SECTION {
                    in_special = true;
                    continue;
                }
                let (piece, score) = line
                    .split_once('\t')
                    .ok_or_else(|| bad(line_no, "expected piece<TAB>score".into()))?;
                let piece = unescape(piece).map_err(|e| bad(line_no, e))?;
                let score: f64 = score
                    .parse()
                    .map_err(|_| bad(line_no, format!("bad score {score:?}")))?;
                pieces.push((piece, score));
            } else {
                let expected = specials
                    .next()
                    .ok_or_else(|| bad(line_no, "too many special tokens".into()))?;
                let got = unescape(line).map_err(|e| bad(line_no, e))?;
                if got != expected.surface() {
                    return Err(bad(
                        line_no,
                        format!("expected special {:?}, found {:?}", expected.surface(), got),
                    ));
                }
            }
        }
        if !in_special {
            return Err(TokenizerError::InvalidVocab("missing [special] section".into()));
        }
        if let Some(missing) = specials.next() {
            return Err(TokenizerError::InvalidVocab(format!(
                "missing special token {:?}",
                missing.surface()
            )));
        }
        Self::new(pieces)
    }

    pub fn load(path: &Path) -> Result<Self, TokenizerError> {
        let text = fs::read_to_string(path).map_err(|source| TokenizerError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_text(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), TokenizerError> {
        fs::write(path, self.to_text()).map_err(|source| TokenizerError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_ids_are_dense() {
        let ids: Vec<u32> = Special::canonical().map(Special::id).collect();
        assert_eq!(ids, (0..NUM_SPECIAL as u32).collect::<Vec<_>>());
        assert_eq!(Special::from_id(NUM_SPECIAL as u32), None);
        assert_eq!(Special::Sentinel(99).id(), 109);
    }

    #[test]
    fn file_round_trip() {
        let v = SubwordVocabulary::new(vec![
            ("a\\b".into(), -1.5),
            ("ab".into(), -0.1),
            ("é".into(), -3.0000000000000004),
        ])
        .unwrap();
        let text = v.to_text();
        assert!(text.starts_with("ECVOCAB 1\na\\\\b\t-1.5\n"));
        assert!(text.contains("[special]\n<pad>\n</s>\n<unk>\n<SEP>\n<|removed|>\n<space*1>\n<space*2>\n<space*4>\n\\t\n\\n\n<extra_id_0>\n"));
        let back = SubwordVocabulary::from_text(&text).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.piece_id("ab"), Some(NUM_SPECIAL as u32 + 1));
    }

    #[test]
    fn rejects_bad_files() {
        assert!(SubwordVocabulary::from_text("nope\n").is_err());
        assert!(SubwordVocabulary::from_text("ECVOCAB 1\na\t-1\n").is_err());
        let mut text = SubwordVocabulary::new(vec![]).unwrap().to_text();
        text = text.replace("<SEP>", "<sep>");
        assert!(SubwordVocabulary::from_text(&text).is_err());
        assert!(SubwordVocabulary::new(vec![("a".into(), 0.0), ("a".into(), 0.0)]).is_err());
        assert!(SubwordVocabulary::new(vec![("a b".into(), 0.0)]).is_err());
    }

    #[test]
    fn escapes() {
        assert_eq!(escape("a\tb\nc\\"), "a\\tb\\nc\\\\");
        assert_eq!(unescape("a\\tb\\nc\\\\").unwrap(), "a\tb\nc\\");
        assert!(unescape("\\x").is_err());
    }
}
