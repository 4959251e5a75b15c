mod common;

use common::{nlpl, ok, stdout, world};
use nlpl_bridge::Session;
use nlpl_core::pipeline::read_binary;
use nlpl_core::sampler::StreamPlan;
use serde_json::Value;

const CODE: &str = "def add(a, b):\n    total = a + b\n    if total == 10:\n\treturn total\n    return 0\n";

#[test]
fn encode_matches_tokenize() {
    let w = world();
    std::fs::write(w.path().join("code.py"), CODE).unwrap();
    let out = ok(nlpl(w.path(), &["tokenize", "encode", "code.py", "--vocab", "vocab.txt"]));
    let cli: Vec<u32> = stdout(&out).split_whitespace().map(|t| t.parse().unwrap()).collect();
    let s = Session::open(&w.path().join("vocab.txt")).unwrap();
    assert_eq!(s.encode(CODE).unwrap(), cli);
    assert_eq!(s.decode(&cli).unwrap(), CODE);
}

#[test]
fn batches_match_build() {
    let w = world();
    ok(nlpl(w.path(), &["plan", "--config", "config.json", "--out", "plan.json"]));
    ok(nlpl(w.path(), &["build", "--config", "config.json", "--plan", "plan.json", "--binary", "out.bin"]));
    let cli = read_binary(std::fs::File::open(w.path().join("out.bin")).unwrap()).unwrap();

    let plan = StreamPlan::load(&w.path().join("plan.json")).unwrap();
    let s = Session::open(&w.path().join("vocab.txt")).unwrap();
    let mut h = s
        .open_plan_files(&w.path().join("config.json"), Some(&w.path().join("plan.json")), Some(&plan.digest()))
        .unwrap();
    let mut got = Vec::new();
    while let Ok(b) = h.next_batch(16) {
        got.extend(b.to_examples().unwrap().into_iter().map(|(_, e)| (e.input_ids, e.target_ids)));
    }
    assert_eq!(got.len(), cli.len());
    assert_eq!(got, cli);
}

#[test]
fn codebleu_matches_eval() {
    let w = world();
    let pairs = [
        ("def add(x, y):\n    return x + y", "def add(a, b):\n    return a + b"),
        ("x = 1\ny = x", "x = 1\ny = x + 1"),
        ("def f(a:\n", "def f(a):\n    return a"),
    ];
    let jsonl: String = pairs
        .iter()
        .map(|(h, r)| serde_json::json!({"hyp": h, "ref": r}).to_string() + "\n")
        .collect();
    std::fs::write(w.path().join("pairs.jsonl"), jsonl).unwrap();
    let out = ok(nlpl(w.path(), &["eval", "--pairs", "pairs.jsonl", "--metrics", "codebleu"]));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let s = Session::empty();
    for (i, (h, r)) in pairs.iter().enumerate() {
        let ours = s.codebleu(h, r).unwrap();
        let row = &report["per_example"][i]["scores"];
        let close = |key: &str, v: Option<f64>| match (row.get(key).and_then(Value::as_f64), v) {
            (Some(a), Some(b)) => assert!((a - b).abs() <= 1e-12, "pair {i} {key}: {a} vs {b}"),
            (None, None) => {}
            other => panic!("pair {i} {key}: {other:?}"),
        };
        close("codebleu", Some(ours.codebleu));
        close("codebleu.ngram_match", Some(ours.ngram_match));
        close("codebleu.weighted_ngram_match", Some(ours.weighted_ngram_match));
        close("codebleu.ast_match", ours.ast_match);
        close("codebleu.dataflow_match", ours.dataflow_match);
    }
}
