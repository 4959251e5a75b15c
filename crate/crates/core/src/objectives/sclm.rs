use crate::tokenizer::{Special, SubwordVocabulary, NUM_SENTINELS};

use super::{ExampleMeta, ObjectiveError, PretrainExample, SpanMask, Task};

/// Builds a span-corruption example: span `k` is replaced by sentinel `k` in
/// the input, and the target lists each sentinel followed by its span,
/// ending with `</s>`.
pub fn build_sclm(
    tokens: &[u32],
    mask: &SpanMask,
    vocab: &SubwordVocabulary,
    corpus_id: &str,
    record_id: &str,
) -> Result<PretrainExample, ObjectiveError> {
    if mask.spans.len() > NUM_SENTINELS {
        return Err(ObjectiveError::TooManySpans(mask.spans.len()));
    }
    if !mask.fits(tokens.len()) {
        return Err(ObjectiveError::MaskMismatch(tokens.len()));
    }
    let mut input = Vec::with_capacity(tokens.len());
    let mut target = Vec::with_capacity(mask.noise_tokens() + mask.spans.len() + 1);
    let mut pos = 0;
    for (k, &(start, len)) in mask.spans.iter().enumerate() {
        let sentinel = vocab.special(Special::Sentinel(k as u8));
        input.extend_from_slice(&tokens[pos..start]);
        input.push(sentinel);
        target.push(sentinel);
        target.extend_from_slice(&tokens[start..start + len]);
        pos = start + len;
    }
    input.extend_from_slice(&tokens[pos..]);
    target.push(vocab.eos());
    Ok(PretrainExample {
        task: Task::Sclm,
        input_ids: input,
        target_ids: target,
        corpus_id: corpus_id.to_string(),
        meta: ExampleMeta {
            record_id: record_id.to_string(),
            ..ExampleMeta::default()
        },
    })
}

/// Inverse of [`build_sclm`]: splices target spans back into the input at
/// their sentinels. Returns `None` if the pair is not well formed.
pub fn reconstruct_sclm(input: &[u32], target: &[u32], vocab: &SubwordVocabulary) -> Option<Vec<u32>> {
    let (&last, body) = target.split_last()?;
    if last != vocab.eos() {
        return None;
    }
    let mut spans: Vec<&[u32]> = Vec::new();
    let mut i = 0;
    while i < body.len() {
        if vocab.is_sentinel(body[i]) != Some(spans.len()) {
            return None;
        }
        let mut j = i + 1;
        while j < body.len() && vocab.is_sentinel(body[j]).is_none() {
            j += 1;
        }
        if j == i + 1 {
            return None;
        }
        spans.push(&body[i + 1..j]);
        i = j;
    }
    let mut out = Vec::with_capacity(input.len() + body.len());
    let mut used = 0;
    for &id in input {
        match vocab.is_sentinel(id) {
            Some(k) if k == used && k < spans.len() => {
                out.extend_from_slice(spans[k]);
                used += 1;
            }
            Some(_) => return None,
            None => out.push(id),
        }
    }
    (used == spans.len()).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::NUM_SPECIAL;

    fn vocab() -> SubwordVocabulary {
        let pieces = ["A", "B", "C", "D", "E"]
            .iter()
            .map(|p| (p.to_string(), -1.0))
            .collect();
        SubwordVocabulary::new(pieces).unwrap()
    }

    fn mask(spans: Vec<(usize, usize)>) -> SpanMask {
        SpanMask {
            spans,
            noise_rate: 0.15,
            mean_span: 3.0,
        }
    }

    #[test]
    fn single_span() {
        let v = vocab();
        let t: Vec<u32> = (0..5).map(|i| (NUM_SPECIAL + i) as u32).collect();
        let ex = build_sclm(&t, &mask(vec![(1, 2)]), &v, "c", "r").unwrap();
        let s0 = v.sentinel(0).unwrap();
        assert_eq!(ex.input_ids, vec![t[0], s0, t[3], t[4]]);
        assert_eq!(ex.target_ids, vec![s0, t[1], t[2], v.eos()]);
        assert_eq!(reconstruct_sclm(&ex.input_ids, &ex.target_ids, &v).unwrap(), t);
    }

    #[test]
    fn empty_mask() {
        let v = vocab();
        let t = vec![110, 111, 112];
        let ex = build_sclm(&t, &mask(vec![]), &v, "c", "r").unwrap();
        assert_eq!(ex.input_ids, t);
        assert_eq!(ex.target_ids, vec![v.eos()]);
    }

    #[test]
    fn two_spans_in_order() {
        let v = vocab();
        let t = vec![110, 111, 112, 113, 114];
        let ex = build_sclm(&t, &mask(vec![(0, 1), (3, 1)]), &v, "c", "r").unwrap();
        let s0 = v.sentinel(0).unwrap();
        let s1 = v.sentinel(1).unwrap();
        assert_eq!(ex.target_ids, vec![s0, 110, s1, 113, v.eos()]);
        assert_eq!(ex.input_ids, vec![s0, 111, 112, s1, 114]);
    }

    #[test]
    fn too_many_spans() {
        let v = vocab();
        let t = vec![110; 300];
        let spans = (0..101).map(|i| (i * 2, 1)).collect();
        assert_eq!(
            build_sclm(&t, &mask(spans), &v, "c", "r"),
            Err(ObjectiveError::TooManySpans(101))
        );
    }

    #[test]
    fn mask_out_of_range() {
        let v = vocab();
        assert!(build_sclm(&[110, 111], &mask(vec![(1, 2)]), &v, "c", "r").is_err());
    }
}
