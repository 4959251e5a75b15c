mod common;

use common::{fixture, goldens, ids, mixed_corpus, test_vocab, ALPHABET};
use nlpl_core::tokenizer::{
    decode, decode_with_source, encode, pretokenize, SegmentKind, Special, SubwordVocabulary,
    TokenizerError,
};
use proptest::prelude::*;

#[test]
fn twelve_token_fixture_matches_exhaustive_search() {
    let g = goldens();
    let fx = &g["tokenizer_fixture"];
    let text = fx["text"].as_str().unwrap();
    let seq = encode(text, &test_vocab());
    assert_eq!(seq.ids, ids(&fx["ids"]));
    assert_eq!(seq.len(), 12);
}

#[test]
fn ties_prefer_fewer_pieces_then_smaller_first_piece() {
    let vocab = test_vocab();
    // "ab" and "a"+"b" score the same.
    assert_eq!(encode("ab", &vocab).ids, vec![vocab.piece_id("ab").unwrap()]);
    // "x"+"yz" and "xy"+"z" score the same with two pieces each.
    assert_eq!(
        encode("xyz", &vocab).ids,
        vec![vocab.piece_id("x").unwrap(), vocab.piece_id("yz").unwrap()]
    );
}

#[test]
fn unknown_characters() {
    let vocab = test_vocab();
    let g = goldens();
    let fx = &g["tokenizer_unk"];
    let text = fx["text"].as_str().unwrap();
    let seq = encode(text, &vocab);
    assert_eq!(seq.ids, ids(&fx["ids"]));
    assert_eq!(decode(&seq.ids, &vocab).unwrap(), "print(é\u{FFFD})");
    assert_eq!(decode_with_source(&seq, text, &vocab).unwrap(), text);
}

#[test]
fn small_cases() {
    let vocab = test_vocab();
    assert!(encode("", &vocab).is_empty());
    assert_eq!(encode("return", &vocab).ids, vec![vocab.piece_id("return").unwrap()]);
    assert_eq!(decode(&[Special::Space4.id()], &vocab).unwrap(), "    ");
    let seq = encode("def f():\n    return 1", &vocab);
    let nl = seq.ids.iter().position(|&i| i == Special::Newline.id()).unwrap();
    assert_eq!(seq.ids[nl + 1], Special::Space4.id());
    assert!(matches!(
        decode(&[vocab.len() as u32], &vocab),
        Err(TokenizerError::UnknownId(_))
    ));
}

#[test]
fn two_hundred_line_code_fixture_round_trips() {
    let vocab = test_vocab();
    let mut code = String::new();
    for i in 0..200 {
        let depth = i % 5;
        code.push_str(&"    ".repeat(depth));
        if i % 7 == 0 {
            code.push('\t');
        }
        code.push_str(&format!("x{i} = self.count({i}, [ab])  # the value\n"));
    }
    assert_eq!(code.lines().count(), 200);
    let seq = encode(&code, &vocab);
    assert!(!seq.ids.contains(&Special::Unk.id()));
    assert_eq!(decode(&seq.ids, &vocab).unwrap(), code);
}

#[test]
fn mixed_corpus_round_trips() {
    let vocab = test_vocab();
    for (i, text) in mixed_corpus(1000, 11).iter().enumerate() {
        let seq = encode(text, &vocab);
        assert!(!seq.ids.contains(&Special::Unk.id()), "file {i}");
        assert_eq!(&decode(&seq.ids, &vocab).unwrap(), text, "file {i}");
    }
}

#[test]
fn whitespace_law_for_runs_up_to_32() {
    let vocab = test_vocab();
    for k in 1..=32 {
        let text = format!("a{}b", " ".repeat(k));
        let seq = encode(&text, &vocab);
        let spaces = &seq.ids[1..seq.len() - 1];
        let mut expected = vec![Special::Space4.id(); k / 4];
        if k % 4 >= 2 {
            expected.push(Special::Space2.id());
        }
        if k % 2 == 1 {
            expected.push(Special::Space1.id());
        }
        assert_eq!(spaces, expected.as_slice(), "k = {k}");
    }
}

#[test]
fn vocabulary_file_round_trips() {
    let vocab = test_vocab();
    let text = std::fs::read_to_string(fixture("test_vocab.txt")).unwrap();
    assert_eq!(vocab.to_text(), text);
    assert_eq!(SubwordVocabulary::from_text(&vocab.to_text()).unwrap(), vocab);
}

#[test]
fn encoding_is_the_same_across_threads() {
    let vocab = test_vocab();
    let files = mixed_corpus(50, 3);
    let serial: Vec<Vec<u32>> = files.iter().map(|f| encode(f, &vocab).ids).collect();
    let parallel: Vec<Vec<u32>> = std::thread::scope(|s| {
        let handles: Vec<_> = files
            .iter()
            .map(|f| s.spawn(|| encode(f, &vocab).ids))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(serial, parallel);
}

fn text_strategy() -> impl Strategy<Value = String> {
    let chars: Vec<char> = ALPHABET.chars().chain([' ', ' ', ' ', '\t', '\n']).collect();
    prop::collection::vec(prop::sample::select(chars), 0..200)
        .prop_map(|cs| cs.into_iter().collect())
}

proptest! {
    #[test]
    fn round_trip(text in text_strategy()) {
        let vocab = test_vocab();
        let seq = encode(&text, &vocab);
        prop_assert_eq!(decode(&seq.ids, &vocab).unwrap(), text);
    }

    #[test]
    fn offsets_partition_the_input(text in "\\PC{0,80}") {
        let vocab = test_vocab();
        let seq = encode(&text, &vocab);
        let mut pos = 0;
        for &(s, e) in &seq.offsets {
            prop_assert_eq!(s, pos);
            prop_assert!(e > s);
            pos = e;
        }
        prop_assert_eq!(pos, text.len());
        prop_assert_eq!(decode_with_source(&seq, &text, &vocab).unwrap(), text);
    }

    #[test]
    fn space_runs_follow_the_greedy_law(k in 1usize..200) {
        let text = " ".repeat(k);
        let segs = pretokenize(&text);
        let kinds: Vec<Special> = segs
            .iter()
            .map(|s| match s.kind {
                SegmentKind::Whitespace(w) => w,
                SegmentKind::Plain => panic!("plain segment in a space run"),
            })
            .collect();
        let fours = kinds.iter().filter(|&&w| w == Special::Space4).count();
        prop_assert_eq!(fours, k / 4);
        prop_assert_eq!(kinds.len(), k / 4 + usize::from(k % 4 >= 2) + k % 2);
    }
}
