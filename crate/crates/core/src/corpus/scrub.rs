//! Docstring leakage scrubbing and the language-label policy for code-paired text.

use regex::Regex;

use super::records::CodeDoc;
use super::registry::{language_name, TEXT_LABEL};

/// Placeholder that replaces docstrings found inside code.
pub const REMOVED_PLACEHOLDER: &str = "<|removed|>";

/// Identified languages need strictly more than this confidence to be used.
pub const LANG_CONFIDENCE_THRESHOLD: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScrubDirection {
    /// Code-to-text: always scrubbed.
    PlToNl,
    /// Text-to-code: scrubbed when the coin lands below 0.5.
    NlToPl,
}

/// Builds the whitespace-insensitive pattern for a docstring, or `None` when
/// the docstring has no visible content.
fn docstring_pattern(docstring: &str) -> Option<Regex> {
    let words: Vec<String> = docstring.split_whitespace().map(regex::escape).collect();
    if words.is_empty() {
        return None;
    }
    Some(Regex::new(&words.join(r"\s+")).expect("escaped pattern is valid"))
}

/// Replaces every whitespace-normalized occurrence of the docstring inside the
/// code with [`REMOVED_PLACEHOLDER`].
///
/// The match is a plain substring match after collapsing whitespace runs, so a
/// docstring that is itself a substring of the placeholder can reappear in
/// the output through the placeholder text.
pub fn scrub_leakage(doc: &CodeDoc, direction: ScrubDirection, coin: f64) -> CodeDoc {
    let apply = match direction {
        ScrubDirection::PlToNl => true,
        ScrubDirection::NlToPl => coin < 0.5,
    };
    if !apply {
        return doc.clone();
    }
    let Some(pattern) = docstring_pattern(&doc.docstring) else {
        return doc.clone();
    };
    if !pattern.is_match(&doc.code) {
        log::debug!("{}: docstring not present in code", doc.id);
        return doc.clone();
    }
    let code = pattern
        .replace_all(&doc.code, regex::NoExpand(REMOVED_PLACEHOLDER))
        .into_owned();
    CodeDoc { code, ..doc.clone() }
}

/// Language label for the text side of a code pair.
///
/// A confidently identified language (above [`LANG_CONFIDENCE_THRESHOLD`])
/// is used when `coin < 0.5`; every other case falls back to `"text"`. With
/// `exempt_english`, confident English is always labelled English.
pub fn label_policy(doc: &CodeDoc, coin: f64, exempt_english: bool) -> String {
    let confident = doc.nl_lang != TEXT_LABEL
        && doc
            .nl_confidence
            .map(|c| c > LANG_CONFIDENCE_THRESHOLD)
            .unwrap_or(false);
    if !confident {
        return TEXT_LABEL.to_string();
    }
    let name = language_name(&doc.nl_lang).unwrap_or(TEXT_LABEL);
    if coin < 0.5 || (exempt_english && doc.nl_lang == "en") {
        name.to_string()
    } else {
        TEXT_LABEL.to_string()
    }
}
