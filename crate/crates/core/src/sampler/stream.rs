//! Materializing the planned stream into examples.
//!
//! Each corpus is walked through a fresh permutation on every pass, keyed by
//! `(seed, corpus_id, pass)`. Translation corpora have two items per record,
//! one per direction, so every pair is used both ways in each pass.
//! Per-example randomness comes from a generator derived from
//! `(seed, corpus_id, record_id, pass, direction)`.
//!
//! A shard `k` of `w` workers replays every draw (cursor movement is cheap)
//! but only builds the examples whose stream index is `k` modulo `w`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use crate::corpus::{
    bundled_profiles, identify_lang, registry, CorpusKind, CorpusManifest, CorpusReader, Record,
    TEXT_LABEL,
};
use crate::objectives::{
    build_ptlm, build_sclm, pack_and_truncate, sample_span_mask, Direction, PretrainExample,
    SpanMask, TranslationPair, DEFAULT_MEAN_SPAN, DEFAULT_NOISE_RATE,
};
use crate::rng::CounterRng;
use crate::tokenizer::{encode, SubwordVocabulary};

use super::{SamplerError, StreamPlan};

#[derive(Debug, Clone, PartialEq)]
pub struct StreamConfig {
    pub max_len: usize,
    pub target_cap: usize,
    pub sep_mode: bool,
    pub noise_rate: f64,
    pub mean_span: f64,
    /// Always label confidently identified English docstrings as English.
    pub exempt_english: bool,
}

impl Default for StreamConfig {
    fn default() -> Self {
        Self {
            max_len: 512,
            target_cap: 512,
            sep_mode: false,
            noise_rate: DEFAULT_NOISE_RATE,
            mean_span: DEFAULT_MEAN_SPAN,
            exempt_english: false,
        }
    }
}

struct LoadedCorpus {
    kind: CorpusKind,
    records: Vec<Record>,
}

/// Lazily loaded corpora of a manifest, shareable across worker threads.
pub struct CorpusStore {
    manifest: CorpusManifest,
    slots: BTreeMap<String, OnceLock<Result<Arc<LoadedCorpus>, String>>>,
}

impl CorpusStore {
    pub fn new(manifest: CorpusManifest) -> Self {
        let slots = manifest
            .entries
            .iter()
            .map(|e| (e.corpus_id.clone(), OnceLock::new()))
            .collect();
        Self { manifest, slots }
    }

    pub fn manifest(&self) -> &CorpusManifest {
        &self.manifest
    }

    fn get(&self, corpus_id: &str) -> Result<Arc<LoadedCorpus>, SamplerError> {
        let data_err = |message: String| SamplerError::Data {
            corpus_id: corpus_id.to_string(),
            message,
        };
        let slot = self
            .slots
            .get(corpus_id)
            .ok_or_else(|| data_err("not in manifest".into()))?;
        slot.get_or_init(|| {
            let entry = self.manifest.get(corpus_id).expect("slot implies entry");
            let path = self.manifest.resolve(entry);
            let reader = CorpusReader::open(&path, entry.kind).map_err(|e| e.to_string())?;
            let records = reader
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            log::debug!("loaded {corpus_id}: {} records", records.len());
            Ok(Arc::new(LoadedCorpus {
                kind: entry.kind,
                records,
            }))
        })
        .clone()
        .map_err(data_err)
    }
}

struct Item {
    corpus: Arc<LoadedCorpus>,
    record: usize,
    direction: Direction,
    pass: u64,
}

/// Position in the stream. Detach it with [`ExampleStream::into_cursor`] and
/// pick up where it left off with [`ExampleStream::resume`].
#[derive(Debug, Clone, Default)]
pub struct StreamCursor {
    next_index: u64,
    /// Items consumed so far per corpus.
    consumed: HashMap<String, u64>,
    permutations: HashMap<String, (u64, Vec<u32>)>,
}

impl StreamCursor {
    /// Stream index of the next draw.
    pub fn position(&self) -> u64 {
        self.next_index
    }
}

/// Iterator over `(stream index, example)` for one shard of the stream.
pub struct ExampleStream<'a> {
    plan: &'a StreamPlan,
    store: &'a CorpusStore,
    vocab: &'a SubwordVocabulary,
    config: StreamConfig,
    shard: u64,
    workers: u64,
    cursor: StreamCursor,
}

impl<'a> ExampleStream<'a> {
    pub fn new(
        plan: &'a StreamPlan,
        store: &'a CorpusStore,
        vocab: &'a SubwordVocabulary,
        config: StreamConfig,
    ) -> Self {
        Self::sharded(plan, store, vocab, config, 0, 1)
    }

    /// Shard `shard` of `workers`.
    pub fn sharded(
        plan: &'a StreamPlan,
        store: &'a CorpusStore,
        vocab: &'a SubwordVocabulary,
        config: StreamConfig,
        shard: u64,
        workers: u64,
    ) -> Self {
        assert!(workers > 0 && shard < workers, "invalid shard {shard}/{workers}");
        Self {
            plan,
            store,
            vocab,
            config,
            shard,
            workers,
            cursor: StreamCursor::default(),
        }
    }

    /// Unsharded stream continuing from `cursor`.
    pub fn resume(
        plan: &'a StreamPlan,
        store: &'a CorpusStore,
        vocab: &'a SubwordVocabulary,
        config: StreamConfig,
        cursor: StreamCursor,
    ) -> Self {
        Self {
            cursor,
            ..Self::new(plan, store, vocab, config)
        }
    }

    pub fn into_cursor(self) -> StreamCursor {
        self.cursor
    }

    /// Builds the next example of this shard, or `None` after `epoch_size`
    /// stream positions.
    pub fn next_example(&mut self) -> Option<Result<(u64, PretrainExample), SamplerError>> {
        while self.cursor.next_index < self.plan.epoch_size {
            let index = self.cursor.next_index;
            self.cursor.next_index += 1;
            let draw = self.plan.draw(index);
            let item = match self.advance(&draw.corpus_id) {
                Ok(item) => item,
                Err(e) => {
                    self.cursor.next_index = self.plan.epoch_size;
                    return Some(Err(e));
                }
            };
            if index % self.workers == self.shard {
                return Some(self.build(&draw.corpus_id, &item).map(|ex| (index, ex)));
            }
        }
        None
    }

    fn advance(&mut self, corpus_id: &str) -> Result<Item, SamplerError> {
        let corpus = self.store.get(corpus_id)?;
        let per_record = match corpus.kind {
            CorpusKind::Document => 1,
            CorpusKind::Parallel | CorpusKind::CodeDoc => 2,
        };
        let len = corpus.records.len() as u64 * per_record;
        if len == 0 {
            return Err(SamplerError::Data {
                corpus_id: corpus_id.to_string(),
                message: "corpus has no records".into(),
            });
        }
        for _ in 0..len {
            let k = self.cursor.consumed.entry(corpus_id.to_string()).or_insert(0);
            let (pass, pos) = (*k / len, *k % len);
            *k += 1;
            let slot = self
                .cursor
                .permutations
                .entry(corpus_id.to_string())
                .or_insert((u64::MAX, Vec::new()));
            if slot.0 != pass {
                let mut perm: Vec<u32> = (0..len as u32).collect();
                CounterRng::new(self.plan.seed)
                    .derive_str(corpus_id)
                    .derive(pass)
                    .shuffle(&mut perm);
                *slot = (pass, perm);
            }
            let v = slot.1[pos as usize] as usize;
            let n = corpus.records.len();
            let (record, direction) = if v < n {
                (v, Direction::Forward)
            } else {
                (v - n, Direction::Reverse)
            };
            if usable(&corpus.records[record]) {
                return Ok(Item {
                    corpus: corpus.clone(),
                    record,
                    direction,
                    pass,
                });
            }
            log::warn!(
                "{corpus_id}: skipping record {} with an empty side",
                corpus.records[record].id()
            );
        }
        Err(SamplerError::Data {
            corpus_id: corpus_id.to_string(),
            message: "no usable records".into(),
        })
    }

    fn build(&self, corpus_id: &str, item: &Item) -> Result<PretrainExample, SamplerError> {
        let record = &item.corpus.records[item.record];
        let mut rng = CounterRng::new(self.plan.seed)
            .derive_str(corpus_id)
            .derive_str(record.id())
            .derive(item.pass * 2 + (item.direction == Direction::Reverse) as u64);
        let cfg = &self.config;
        let objective_err = |source| SamplerError::Objective {
            corpus_id: corpus_id.to_string(),
            source,
        };
        let ex = match record {
            Record::Document(doc) => {
                let mut tokens = encode(&doc.text, self.vocab).ids;
                tokens.truncate(cfg.max_len);
                let mask = if tokens.len() >= 2 {
                    sample_span_mask(tokens.len(), cfg.noise_rate, cfg.mean_span, &mut rng)
                        .map_err(objective_err)?
                } else {
                    SpanMask::empty(cfg.noise_rate, cfg.mean_span)
                };
                build_sclm(&tokens, &mask, self.vocab, corpus_id, &doc.id)
            }
            Record::Parallel(pair) => build_ptlm(
                &TranslationPair::from_parallel(pair, item.direction),
                self.vocab,
                cfg.sep_mode,
                corpus_id,
            ),
            Record::CodeDoc(doc) => {
                let mut doc = doc.clone();
                if doc.nl_confidence.is_none() && doc.nl_lang == TEXT_LABEL {
                    if let Ok((lang, conf)) = identify_lang(&doc.docstring, bundled_profiles()) {
                        if registry::is_language_code(&lang) {
                            doc.nl_lang = lang;
                            doc.nl_confidence = Some(conf);
                        }
                    }
                }
                let scrub_coin = rng.next_f64();
                let label_coin = rng.next_f64();
                let pair = TranslationPair::from_codedoc(
                    &doc,
                    item.direction,
                    scrub_coin,
                    label_coin,
                    cfg.exempt_english,
                );
                build_ptlm(&pair, self.vocab, cfg.sep_mode, corpus_id)
            }
        }
        .map_err(objective_err)?;
        pack_and_truncate(ex, cfg.max_len, cfg.target_cap).map_err(objective_err)
    }
}

fn usable(record: &Record) -> bool {
    match record {
        Record::CodeDoc(doc) => !doc.docstring.trim().is_empty(),
        _ => true,
    }
}

impl Iterator for ExampleStream<'_> {
    type Item = Result<(u64, PretrainExample), SamplerError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_example()
    }
}
