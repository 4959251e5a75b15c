mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;

use common::goldens;
use nlpl_core::corpus::{CorpusManifest, Modality};
use nlpl_core::objectives::Task;
use nlpl_core::sampler::{
    manifest_weights, plan_stream, rescale, CorpusStore, ExampleStream, ModalityWeights,
    StreamConfig, StreamPlan,
};
use nlpl_core::tokenizer::SubwordVocabulary;
use proptest::prelude::*;

fn dist(ps: &[f64]) -> BTreeMap<String, f64> {
    ps.iter()
        .enumerate()
        .map(|(i, p)| (format!("c{i}"), *p))
        .collect()
}

fn only_sclm(ps: &[f64], alpha: f64) -> ModalityWeights {
    ModalityWeights {
        sclm: Some(rescale(&dist(ps), alpha).unwrap()),
        ptlm: None,
    }
}

#[test]
fn rescale_matches_reference() {
    let g = goldens();
    let want: Vec<f64> = g["rescale_09_01_a03"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let w = rescale(&dist(&[0.9, 0.1]), 0.3).unwrap();
    assert!((w.rescaled["c0"] - want[0]).abs() < 1e-3);
    assert!((w.rescaled["c1"] - want[1]).abs() < 1e-3);
    assert!((w.rescaled["c0"] - 0.659).abs() < 1e-3);
}

#[test]
fn identity_and_symmetry_are_exact() {
    let p = dist(&[0.7, 0.2, 0.1]);
    assert_eq!(rescale(&p, 1.0).unwrap().rescaled, p);
    for alpha in [0.1, 0.3, 0.77, 1.0] {
        let w = rescale(&dist(&[0.5, 0.5]), alpha).unwrap();
        assert_eq!(w.rescaled["c0"], 0.5);
        assert_eq!(w.rescaled["c1"], 0.5);
    }
    assert!(rescale(&p, 0.0).is_err());
    assert!(rescale(&dist(&[0.0, 0.0]), 0.3).is_err());
}

#[test]
fn table_shaped_distribution_flattens_the_head() {
    // Shares of the six code languages in the code-search corpus.
    let counts = [726_768.0, 1_569_889.0, 1_857_835.0, 977_821.0, 1_156_085.0, 164_048.0];
    let total: f64 = counts.iter().sum();
    let p: Vec<f64> = counts.iter().map(|c| c / total).collect();
    let w = rescale(&dist(&p), 0.3).unwrap();
    let max_p = p.iter().copied().fold(0.0, f64::max);
    let max_q = w.rescaled.values().copied().fold(0.0, f64::max);
    assert!(max_q <= max_p);
    let min_p = p.iter().copied().fold(1.0, f64::min);
    let min_q = w.rescaled.values().copied().fold(1.0, f64::min);
    assert!(min_q >= min_p);
}

#[test]
fn draw_frequencies_follow_q() {
    let nl = only_sclm(&[0.9, 0.1], 0.3);
    let pl = only_sclm(&[0.5, 0.3, 0.2], 0.3);
    let plan = plan_stream(&nl, &pl, 0.3, 0.5, 2024, 200_000).unwrap();
    let mut counts: BTreeMap<(Modality, String), u64> = BTreeMap::new();
    for i in 0..200_000 {
        let d = plan.draw(i);
        *counts.entry((d.modality, d.corpus_id)).or_default() += 1;
    }
    for (modality, q) in [(Modality::Nl, &plan.nl), (Modality::Pl, &plan.pl)] {
        for (id, qi) in q {
            let freq = counts[&(modality, id.clone())] as f64 / 100_000.0;
            assert!((freq - qi).abs() <= 0.01, "{id}: {freq} vs {qi}");
        }
    }
}

#[test]
fn modalities_alternate() {
    let plan = plan_stream(&only_sclm(&[1.0], 0.3), &only_sclm(&[1.0], 0.3), 0.3, 0.5, 1, 10).unwrap();
    let seq: Vec<_> = (0..10).map(|i| plan.draw(i)).collect();
    assert_eq!(seq.iter().filter(|d| d.modality == Modality::Nl).count(), 5);
    for (i, d) in seq.iter().enumerate() {
        assert_eq!(d.modality, if i % 2 == 0 { Modality::Nl } else { Modality::Pl });
        assert_eq!(d.corpus_id, "c0");
    }
}

#[test]
fn task_mix_splits_each_modality() {
    let w = ModalityWeights {
        sclm: Some(rescale(&dist(&[1.0]), 0.3).unwrap()),
        ptlm: Some(rescale(&BTreeMap::from([("pair".to_string(), 1.0)]), 0.3).unwrap()),
    };
    let combined = w.combine(0.25);
    assert_eq!(combined["c0"], 0.25);
    assert_eq!(combined["pair"], 0.75);
}

fn world() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../cli/tests/fixtures/world")
}

fn world_plan(seed: u64, epoch: u64) -> (StreamPlan, CorpusStore, SubwordVocabulary) {
    let manifest = CorpusManifest::load(&world().join("manifest.json")).unwrap();
    let (nl, pl) = manifest_weights(&manifest, 0.3).unwrap();
    let plan = plan_stream(&nl, &pl, 0.3, 0.5, seed, epoch).unwrap();
    let vocab = SubwordVocabulary::load(&world().join("vocab.txt")).unwrap();
    (plan, CorpusStore::new(manifest), vocab)
}

#[test]
fn streams_are_deterministic_and_shard_cleanly() {
    let (plan, store, vocab) = world_plan(7, 120);
    let full: Vec<_> = ExampleStream::new(&plan, &store, &vocab, StreamConfig::default())
        .collect::<Result<_, _>>()
        .unwrap();
    let again: Vec<_> = ExampleStream::new(&plan, &store, &vocab, StreamConfig::default())
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(full, again);
    assert_eq!(full.len(), 120);
    for w in [2u64, 3, 4] {
        for k in 0..w {
            let shard: Vec<_> =
                ExampleStream::sharded(&plan, &store, &vocab, StreamConfig::default(), k, w)
                    .collect::<Result<_, _>>()
                    .unwrap();
            let expected: Vec<_> = full.iter().filter(|(i, _)| i % w == k).cloned().collect();
            assert_eq!(shard, expected, "shard {k}/{w}");
        }
    }
    let tasks: Vec<Task> = full.iter().map(|(_, ex)| ex.task).collect();
    assert!(tasks.contains(&Task::Sclm) && tasks.contains(&Task::Ptlm));
}

#[test]
fn single_record_corpus_repeats() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("nl.jsonl"),
        "{\"id\":\"only\",\"text\":\"the value is returned\",\"lang\":\"en\",\"kind\":\"NL\"}\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("pl.jsonl"),
        "{\"id\":\"code\",\"text\":\"x = 1\",\"lang\":\"Python\",\"kind\":\"PL\",\"pl_name\":\"Python\"}\n",
    )
    .unwrap();
    let manifest_json = r#"{"entries":[
        {"corpus_id":"nl","path":"nl.jsonl","kind":"document","modality":"NL","lang":"en","sample_count":1},
        {"corpus_id":"pl","path":"pl.jsonl","kind":"document","modality":"PL","lang":"Python","sample_count":1}]}"#;
    std::fs::write(dir.path().join("m.json"), manifest_json).unwrap();
    let manifest = CorpusManifest::load(&dir.path().join("m.json")).unwrap();
    let (nl, pl) = manifest_weights(&manifest, 0.3).unwrap();
    let plan = plan_stream(&nl, &pl, 0.3, 0.5, 3, 8).unwrap();
    let vocab = SubwordVocabulary::load(&world().join("vocab.txt")).unwrap();
    let store = CorpusStore::new(manifest);
    let examples: Vec<_> = ExampleStream::new(&plan, &store, &vocab, StreamConfig::default())
        .collect::<Result<_, _>>()
        .unwrap();
    for (i, ex) in &examples {
        let want = if i % 2 == 0 { "only" } else { "code" };
        assert_eq!(ex.meta.record_id, want);
    }
}

proptest! {
    #[test]
    fn rescaled_ratios(ps in prop::collection::vec(0.001f64..1.0, 2..8), alpha in 0.05f64..=1.0) {
        let total: f64 = ps.iter().sum();
        let p: Vec<f64> = ps.iter().map(|x| x / total).collect();
        let w = rescale(&dist(&p), alpha).unwrap();
        let q: Vec<f64> = w.rescaled.values().copied().collect();
        prop_assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let keys: Vec<&String> = w.rescaled.keys().collect();
        let p_of = |k: &String| w.raw[k];
        for a in &keys {
            for b in &keys {
                let (pa, pb) = (p_of(a), p_of(b));
                let (qa, qb) = (w.rescaled[*a], w.rescaled[*b]);
                prop_assert!(((qa / qb) - (pa / pb).powf(alpha)).abs() <= 1e-9 * (pa / pb).powf(alpha).max(1.0));
                if pa > pb {
                    prop_assert!(qa > qb);
                }
            }
        }
    }

    #[test]
    fn even_prefixes_are_balanced(seed in any::<u64>(), len in 0u64..200) {
        let plan = plan_stream(&only_sclm(&[0.6, 0.4], 0.3), &only_sclm(&[0.2, 0.8], 0.3), 0.3, 0.5, seed, 1000).unwrap();
        let nl = (0..len * 2).filter(|&i| plan.draw(i).modality == Modality::Nl).count() as u64;
        prop_assert_eq!(nl, len);
    }
}
