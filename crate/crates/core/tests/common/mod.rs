#![allow(dead_code)]

pub mod codebleu_oracle;

use std::path::PathBuf;

use nlpl_core::tokenizer::SubwordVocabulary;
use serde_json::Value;

/// Core fixture file; the path also resolves when this module is shared
/// with the command-line crate's tests.
pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

pub fn test_vocab() -> SubwordVocabulary {
    SubwordVocabulary::load(&fixture("test_vocab.txt")).expect("test vocab loads")
}

/// Values frozen by `oracles/core_oracle.py`.
pub fn goldens() -> Value {
    let text = std::fs::read_to_string(fixture("core_goldens.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn ids(v: &Value) -> Vec<u32> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap() as u32)
        .collect()
}

/// Characters every test-vocabulary text is built from; all are pieces, so
/// encoding never needs `<unk>`.
pub const ALPHABET: &str = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789()[]{}:;.,=+-*/#_'\"<>!?%&|@^~`$\\éñ";

const WORDS: &[&str] = &[
    "the", "value", "is", "returned", "when", "self", "print", "x", "yz", "ab", "index", "list",
    "count", "Error", "None", "True", "x1", "data_2", "é", "niño", "f(x)", "a==b", "[0]", "{}",
];
const INDENTS: &[&str] = &["", "    ", "  ", " ", "\t", "        ", "\t\t", "   ", "      ", " \t "];

/// `n` deterministic mixed prose/code files for round-trip checks. Every
/// file uses only characters of [`ALPHABET`] plus spaces, tabs and newlines.
pub fn mixed_corpus(n: usize, seed: u64) -> Vec<String> {
    use nlpl_core::rng::CounterRng;
    (0..n)
        .map(|i| {
            let mut rng = CounterRng::new(seed).derive(i as u64);
            let lines = 1 + rng.below(40) as usize;
            let code = i % 2 == 1;
            let mut out = String::new();
            for l in 0..lines {
                if code {
                    out.push_str(INDENTS[rng.below(INDENTS.len() as u64) as usize]);
                }
                let words = 1 + rng.below(12) as usize;
                for w in 0..words {
                    if w > 0 {
                        let gap = if code { 1 + rng.below(5) as usize } else { 1 };
                        out.push_str(&" ".repeat(gap));
                    }
                    out.push_str(WORDS[rng.below(WORDS.len() as u64) as usize]);
                }
                if code && rng.below(4) == 0 {
                    out.push_str(" # note");
                }
                if l + 1 < lines || rng.below(2) == 0 {
                    out.push('\n');
                }
                if rng.below(8) == 0 {
                    out.push('\n');
                }
            }
            if rng.below(10) == 0 {
                out.push_str("   \t  ");
            }
            out
        })
        .collect()
}
