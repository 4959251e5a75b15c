use crate::corpus::registry::prompt_name;
use crate::corpus::{label_policy, scrub_leakage, CodeDoc, ParallelPair, ScrubDirection};
use crate::tokenizer::{encode, Special, SubwordVocabulary};

use super::{ExampleMeta, ObjectiveError, PretrainExample, Task};

/// Prompt for program repair.
pub const REPAIR_PROMPT: &str = "fix bugs: \n";

/// Translation prompt `"translate {A} to {B}: \n"`. Labels may be language
/// codes, language names, PL names or `"text"`.
pub fn translate_prompt(source: &str, target: &str) -> Result<String, ObjectiveError> {
    let a = prompt_name(source).ok_or_else(|| ObjectiveError::UnknownLanguage(source.into()))?;
    let b = prompt_name(target).ok_or_else(|| ObjectiveError::UnknownLanguage(target.into()))?;
    Ok(format!("translate {a} to {b}: \n"))
}

/// Which way a pair is read. Each pair is used once in each direction per
/// epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Source to target as stored; code to text for code-doc pairs.
    Forward,
    Reverse,
}

/// One directed translation instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationPair {
    pub id: String,
    pub source: String,
    pub source_label: String,
    pub target: String,
    pub target_label: String,
}

impl TranslationPair {
    pub fn from_parallel(pair: &ParallelPair, direction: Direction) -> Self {
        let (source, source_label, target, target_label) = match direction {
            Direction::Forward => (
                &pair.source_text,
                &pair.source_lang,
                &pair.target_text,
                &pair.target_lang,
            ),
            Direction::Reverse => (
                &pair.target_text,
                &pair.target_lang,
                &pair.source_text,
                &pair.source_lang,
            ),
        };
        Self {
            id: pair.id.clone(),
            source: source.clone(),
            source_label: source_label.clone(),
            target: target.clone(),
            target_label: target_label.clone(),
        }
    }

    /// Code-to-text (forward) or text-to-code (reverse). The code is scrubbed
    /// of its docstring always for code-to-text and when `scrub_coin < 0.5`
    /// for text-to-code; the text label follows [`label_policy`].
    pub fn from_codedoc(
        doc: &CodeDoc,
        direction: Direction,
        scrub_coin: f64,
        label_coin: f64,
        exempt_english: bool,
    ) -> Self {
        let scrub_dir = match direction {
            Direction::Forward => ScrubDirection::PlToNl,
            Direction::Reverse => ScrubDirection::NlToPl,
        };
        let code = scrub_leakage(doc, scrub_dir, scrub_coin).code;
        let nl_label = label_policy(doc, label_coin, exempt_english);
        let pl_label = doc.pl_name.name().to_string();
        let (source, source_label, target, target_label) = match direction {
            Direction::Forward => (code, pl_label, doc.docstring.clone(), nl_label),
            Direction::Reverse => (doc.docstring.clone(), nl_label, code, pl_label),
        };
        Self {
            id: doc.id.clone(),
            source,
            source_label,
            target,
            target_label,
        }
    }
}

/// Builds a translation example. The input is the encoded prompt followed by
/// the encoded source, plus `<SEP>` and sentinel 0 when `sep_mode` is on; the
/// target is the encoded target text followed by `</s>`.
pub fn build_ptlm(
    pair: &TranslationPair,
    vocab: &SubwordVocabulary,
    sep_mode: bool,
    corpus_id: &str,
) -> Result<PretrainExample, ObjectiveError> {
    if pair.source.trim().is_empty() || pair.target.trim().is_empty() {
        return Err(ObjectiveError::EmptySide(pair.id.clone()));
    }
    let prompt = translate_prompt(&pair.source_label, &pair.target_label)?;
    let mut input = encode(&prompt, vocab).ids;
    let prompt_len = input.len();
    input.extend(encode(&pair.source, vocab).ids);
    let mut suffix_len = 0;
    if sep_mode {
        input.push(vocab.special(Special::Sep));
        input.push(vocab.special(Special::Sentinel(0)));
        suffix_len = 2;
    }
    let mut target = encode(&pair.target, vocab).ids;
    target.push(vocab.eos());
    Ok(PretrainExample {
        task: Task::Ptlm,
        input_ids: input,
        target_ids: target,
        corpus_id: corpus_id.to_string(),
        meta: ExampleMeta {
            record_id: pair.id.clone(),
            direction: Some((pair.source_label.clone(), pair.target_label.clone())),
            prompt_len,
            suffix_len,
            ..ExampleMeta::default()
        },
    })
}

/// Truncates the input to `max_len` tokens and the target to `target_cap`
/// tokens, cutting from the tail. The prompt prefix and separator suffix of
/// the input survive intact and the target keeps its final `</s>`.
pub fn pack_and_truncate(
    mut ex: PretrainExample,
    max_len: usize,
    target_cap: usize,
) -> Result<PretrainExample, ObjectiveError> {
    let fixed = ex.meta.prompt_len + ex.meta.suffix_len;
    if fixed > max_len {
        return Err(ObjectiveError::PromptTooLong {
            needed: fixed,
            max_len,
        });
    }
    if ex.input_ids.len() > max_len {
        let suffix = ex.input_ids.split_off(ex.input_ids.len() - ex.meta.suffix_len);
        ex.input_ids.truncate(max_len - ex.meta.suffix_len);
        ex.input_ids.extend(suffix);
        ex.meta.truncated_input = true;
    }
    if ex.target_ids.len() > target_cap {
        let last = *ex.target_ids.last().expect("non-empty");
        ex.target_ids.truncate(target_cap.saturating_sub(1));
        ex.target_ids.push(last);
        ex.meta.truncated_target = true;
    }
    Ok(ex)
}
