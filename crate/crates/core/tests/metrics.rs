mod common;

use nlpl_core::metrics::*;
use nlpl_core::rng::CounterRng;
use proptest::prelude::*;
use serde_json::Value;

use common::fixture;
use common::codebleu_oracle::{brute_ast, brute_dataflow, random_renaming, rename, TRACED};

fn pairs_fixture() -> Vec<Value> {
    std::fs::read_to_string(fixture("metrics_pairs.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn corpus_fixture() -> Value {
    serde_json::from_str(&std::fs::read_to_string(fixture("metrics_corpus.json")).unwrap()).unwrap()
}

#[test]
fn sentence_bleu_and_chrf_match_sacrebleu() {
    let rows = pairs_fixture();
    assert_eq!(rows.len(), 100);
    for row in &rows {
        let (h, r) = (row["hyp"].as_str().unwrap(), row["ref"].as_str().unwrap());
        let bleu = sentence_bleu(h, r);
        let c = chrf(h, r, 6, 2.0);
        assert!((bleu - row["bleu"].as_f64().unwrap()).abs() < 1e-4, "{h:?}: {bleu}");
        assert!((c - row["chrf"].as_f64().unwrap()).abs() < 1e-3, "{h:?}: {c}");
    }
}

#[test]
fn corpus_bleu_and_chrf_match_sacrebleu() {
    let rows = pairs_fixture();
    let hyps: Vec<&str> = rows.iter().map(|r| r["hyp"].as_str().unwrap()).collect();
    let refs: Vec<&str> = rows.iter().map(|r| r["ref"].as_str().unwrap()).collect();
    let want = corpus_fixture();
    let bleu = corpus_bleu(&hyps, &refs).unwrap();
    assert!((bleu - want["bleu"].as_f64().unwrap()).abs() < 1e-4, "{bleu}");
    let c = corpus_chrf(&hyps, &refs, 6, 2.0);
    assert!((c - want["chrf"].as_f64().unwrap()).abs() < 1e-3, "{c}");
}

#[test]
fn named_examples() {
    let want = corpus_fixture();
    let b = sentence_bleu("the cat sat on the mat", "the cat is on the mat");
    assert!((b - want["cat_mat_bleu"].as_f64().unwrap()).abs() < 1e-4);
    let c = chrf("abcd", "abce", 6, 2.0);
    assert!((c - want["abcd_abce_chrf"].as_f64().unwrap()).abs() < 1e-3);
    // LCS 3, P = 3/4, R = 1, beta^2 = 1.2.
    let r = rouge_l(&["a", "b", "c", "d"], &["a", "c", "d"], 1.2);
    assert!((r - 100.0 * 2.2 * 0.75 / (1.0 + 1.2 * 0.75)).abs() < 1e-9);
}

#[test]
fn corpus_bleu_rejects_empty() {
    let e: [&str; 0] = [];
    assert!(corpus_bleu(&e, &e).is_err());
    let d = corpus_bleu(&["p q r s"], &["w x y z"]).unwrap();
    assert_eq!(d, 0.0);
}

#[test]
fn traced_fixtures_match_enumeration() {
    for &(h, r, ast, dfg) in TRACED {
        assert_eq!(brute_ast(h, r), ast, "ast oracle {h:?}");
        assert_eq!(brute_dataflow(h, r), dfg, "dataflow oracle {h:?}");
        assert_eq!(ast_match(h, r, 2), ast, "ast {h:?}");
        assert_eq!(dataflow_match(h, r), dfg, "dataflow {h:?}");
    }
}

#[test]
fn identical_code_scores_one_everywhere() {
    for &(_, r, _, _) in TRACED {
        let s = codebleu(r, r, &MetricConfig::default()).unwrap();
        assert!((s.ngram_match - 1.0).abs() < 1e-12, "{r:?}");
        assert!((s.weighted_ngram_match - 1.0).abs() < 1e-12, "{r:?}");
        assert_eq!(s.ast_match, Some(1.0));
        assert!(s.dataflow_match.map_or(true, |d| d == 1.0));
        assert!((s.codebleu - 1.0).abs() < 1e-12);
    }
}


#[test]
fn alpha_renaming_invariance() {
    let mut rng = CounterRng::new(7);
    for i in 0..100 {
        let (h, r, _, _) = TRACED[i % TRACED.len()];
        let map = random_renaming((h, r), &mut rng);
        let (h2, r2) = (rename(h, &map), rename(r, &map));
        assert_eq!(ast_match(&h2, &r2, 2), ast_match(h, r, 2), "{h2:?} / {r2:?}");
        assert_eq!(dataflow_match(&h2, &r2), dataflow_match(h, r), "{h2:?} / {r2:?}");
    }
}

#[test]
fn keyword_preserving_rename_scores_at_least_plain() {
    // Hand count over code tokens: unigram matches 5/8 plain, 13/16 weighted;
    // bigrams 2/7 vs 6/19; trigrams 1/6 vs 5/18; no 4-gram match either way.
    let r = "def f(a):\n    return a\n";
    let h = "def g(b):\n    return b\n";
    let kw = KeywordTable::default();
    let weighted = weighted_ngram_match(h, r, &kw, "python").unwrap();
    let plain = sentence_bleu_code(h, r);
    let expected_w = (0.8125f64 * (6.0 / 19.0) * (5.0 / 18.0) * (1.0 / 10.0)).powf(0.25);
    let expected_p = (0.625f64 * (2.0 / 7.0) * (1.0 / 6.0) * (1.0 / 10.0)).powf(0.25);
    assert!((weighted - expected_w).abs() < 1e-12);
    assert!((plain - expected_p).abs() < 1e-12);
    assert!(weighted >= plain);
}

fn sentence_bleu_code(h: &str, r: &str) -> f64 {
    let g = nlpl_core::codegraph::code_tokens;
    compute_bleu(&bleu_stats(&g(h), &g(r)), true) / 100.0
}

#[test]
fn codebleu_weight_errors() {
    let cfg = MetricConfig {
        codebleu_weights: [0.5, 0.5, 0.5, 0.0],
        ..Default::default()
    };
    assert!(codebleu("x = 1", "x = 1", &cfg).is_err());
}

#[test]
fn corpus_codebleu_flags_exclusions() {
    let pairs = vec![("x = 1", "x = 1"), ("pass", "pass")];
    let rep = evaluate(&pairs, &[Metric::Codebleu], &MetricConfig::default(), 1).unwrap();
    assert!(rep.per_example[0].flags.contains(&"dataflow_match_excluded".to_string()));
    assert!(!rep.corpus.contains_key("codebleu.dataflow_match"));
    assert!((rep.corpus["codebleu"] - 1.0).abs() < 1e-12);
}

fn word() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["the", "cat", "a", "dog", "sat", "on", "mat", "x", "runs", "42", "(b)", "end."])
        .prop_map(str::to_string)
}

proptest! {
    #[test]
    fn identity_is_maximal(words in prop::collection::vec(word(), 1..30)) {
        let s = words.join(" ");
        prop_assert!((sentence_bleu(&s, &s) - 100.0).abs() < 1e-9);
        prop_assert!((chrf(&s, &s, 6, 2.0) - 100.0).abs() < 1e-9);
        let t = tokenize_13a(&s);
        prop_assert!((rouge_l(&t, &t, 1.2) - 100.0).abs() < 1e-9);
        prop_assert_eq!(exact_match(&[s.as_str()], &[s.as_str()]).unwrap(), 100.0);
    }

    #[test]
    fn appending_a_foreign_token_never_helps(words in prop::collection::vec(word(), 1..30)) {
        let s = words.join(" ");
        let worse = format!("{s} zzzq");
        prop_assert!(sentence_bleu(&worse, &s) <= sentence_bleu(&s, &s) + 1e-9);
        prop_assert!(chrf(&worse, &s, 6, 2.0) <= chrf(&s, &s, 6, 2.0) + 1e-9);
        let (t, w) = (tokenize_13a(&s), tokenize_13a(&worse));
        prop_assert!(rouge_l(&w, &t, 1.2) <= rouge_l(&t, &t, 1.2) + 1e-9);
    }

    #[test]
    fn chrf_stats_are_additive(a in prop::collection::vec(word(), 1..10), b in prop::collection::vec(word(), 1..10)) {
        let (x, y) = (a.join(" "), b.join(" "));
        let mut sum = chrf_stats(&x, &y, 6);
        sum.add(&chrf_stats(&y, &x, 6));
        let direct = corpus_chrf(&[x.as_str(), y.as_str()], &[y.as_str(), x.as_str()], 6, 2.0);
        prop_assert_eq!(compute_chrf(&sum, 2.0), direct);
    }
}
