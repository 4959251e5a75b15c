//! In-process access to the pipeline for external training loops.
//!
//! A [`Session`] holds one vocabulary. [`PlanHandle`]s opened from it yield
//! the same examples, in the same order, as `nlpl build` for the same config
//! and plan, packed into flat [`BridgeBatch`] buffers. The [`ffi`] module
//! exposes all of it over a C ABI; `include/nlpl_bridge.h` declares it.

pub mod ffi;

use std::path::Path;
use std::sync::Arc;

use nlpl_core::metrics::{codebleu, CodeBleuScore, MetricConfig, MetricError};
use nlpl_core::objectives::{ExampleMeta, PretrainExample, Task};
use nlpl_core::pipeline::{PipelineConfig, PipelineError};
use nlpl_core::sampler::{CorpusStore, ExampleStream, SamplerError, StreamConfig, StreamCursor, StreamPlan};
use nlpl_core::tokenizer::{decode, encode, SubwordVocabulary, TokenizerError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("no vocabulary loaded")]
    NoVocab,
    #[error("plan digest {actual} does not match the expected {expected}")]
    PlanMismatch { expected: String, actual: String },
    #[error("stream exhausted after {0} examples")]
    Exhausted(u64),
    #[error("batch size must be positive")]
    EmptyBatch,
    #[error("malformed batch: {0}")]
    Malformed(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Tokenizer(#[from] TokenizerError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

pub type Result<T> = std::result::Result<T, BridgeError>;

/// Task tags used in [`BridgeBatch::tasks`].
pub const TASK_SCLM: u8 = 0;
pub const TASK_PTLM: u8 = 1;

fn task_tag(task: Task) -> u8 {
    match task {
        Task::Sclm => TASK_SCLM,
        Task::Ptlm => TASK_PTLM,
    }
}

/// Examples packed into flat buffers. Example `i` owns `lengths[2i]` input
/// ids followed by `lengths[2i + 1]` target ids in `ids`, starting where
/// example `i - 1` ended.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BridgeBatch {
    pub ids: Vec<u32>,
    pub lengths: Vec<u32>,
    pub tasks: Vec<u8>,
    /// Stream index of each example.
    pub indices: Vec<u64>,
    pub corpus_ids: Vec<String>,
}

impl BridgeBatch {
    pub fn from_examples<'a>(examples: impl IntoIterator<Item = (u64, &'a PretrainExample)>) -> Self {
        let mut b = BridgeBatch::default();
        for (index, ex) in examples {
            b.ids.extend_from_slice(&ex.input_ids);
            b.ids.extend_from_slice(&ex.target_ids);
            b.lengths.push(ex.input_ids.len() as u32);
            b.lengths.push(ex.target_ids.len() as u32);
            b.tasks.push(task_tag(ex.task));
            b.indices.push(index);
            b.corpus_ids.push(ex.corpus_id.clone());
        }
        b
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.tasks.len();
        if self.lengths.len() != 2 * n || self.indices.len() != n || self.corpus_ids.len() != n {
            return Err(BridgeError::Malformed(format!(
                "{n} tasks, {} lengths, {} indices, {} corpus ids",
                self.lengths.len(),
                self.indices.len(),
                self.corpus_ids.len()
            )));
        }
        let total: u64 = self.lengths.iter().map(|l| *l as u64).sum();
        if total != self.ids.len() as u64 {
            return Err(BridgeError::Malformed(format!(
                "lengths sum to {total} but the buffer holds {}",
                self.ids.len()
            )));
        }
        if let Some(t) = self.tasks.iter().find(|t| **t > TASK_PTLM) {
            return Err(BridgeError::Malformed(format!("unknown task tag {t}")));
        }
        Ok(())
    }

    /// Unpacks into examples. Metadata other than the corpus is not carried
    /// and comes back as the default.
    pub fn to_examples(&self) -> Result<Vec<(u64, PretrainExample)>> {
        self.validate()?;
        let mut out = Vec::with_capacity(self.len());
        let mut pos = 0;
        for i in 0..self.len() {
            let (a, b) = (self.lengths[2 * i] as usize, self.lengths[2 * i + 1] as usize);
            out.push((
                self.indices[i],
                PretrainExample {
                    task: if self.tasks[i] == TASK_SCLM { Task::Sclm } else { Task::Ptlm },
                    input_ids: self.ids[pos..pos + a].to_vec(),
                    target_ids: self.ids[pos + a..pos + a + b].to_vec(),
                    corpus_id: self.corpus_ids[i].clone(),
                    meta: ExampleMeta::default(),
                },
            ));
            pos += a + b;
        }
        Ok(out)
    }
}

/// `{"codebleu", "ngram_match", "weighted_ngram_match", "ast_match",
/// "dataflow_match"}`, with `null` for a component that was not computed.
pub fn codebleu_json(s: &CodeBleuScore) -> String {
    serde_json::json!({
        "codebleu": s.codebleu,
        "ngram_match": s.ngram_match,
        "weighted_ngram_match": s.weighted_ngram_match,
        "ast_match": s.ast_match,
        "dataflow_match": s.dataflow_match,
    })
    .to_string()
}

/// One loaded vocabulary.
pub struct Session {
    vocab: Option<Arc<SubwordVocabulary>>,
}

impl Session {
    /// A session without a vocabulary; only [`Session::codebleu`] works.
    pub fn empty() -> Self {
        Session { vocab: None }
    }

    pub fn open(vocab_path: &Path) -> Result<Self> {
        Ok(Self::with_vocab(SubwordVocabulary::load(vocab_path)?))
    }

    pub fn with_vocab(vocab: SubwordVocabulary) -> Self {
        Session {
            vocab: Some(Arc::new(vocab)),
        }
    }

    fn vocab(&self) -> Result<&Arc<SubwordVocabulary>> {
        self.vocab.as_ref().ok_or(BridgeError::NoVocab)
    }

    pub fn encode(&self, text: &str) -> Result<Vec<u32>> {
        Ok(encode(text, self.vocab()?).ids)
    }

    pub fn decode(&self, ids: &[u32]) -> Result<String> {
        Ok(decode(ids, self.vocab()?)?)
    }

    pub fn codebleu(&self, hyp: &str, reference: &str) -> Result<CodeBleuScore> {
        Ok(codebleu(hyp, reference, &MetricConfig::default())?)
    }

    /// Opens the stream of `plan` over the corpora of `config`'s manifest.
    /// With `expected_digest`, refuses a plan whose [`StreamPlan::digest`]
    /// differs.
    pub fn open_plan(&self, config: &PipelineConfig, plan: StreamPlan, expected_digest: Option<&str>) -> Result<PlanHandle> {
        let vocab = self.vocab()?.clone();
        plan.validate()?;
        let actual = plan.digest();
        if let Some(expected) = expected_digest {
            if !expected.eq_ignore_ascii_case(&actual) {
                return Err(BridgeError::PlanMismatch {
                    expected: expected.to_string(),
                    actual,
                });
            }
        }
        Ok(PlanHandle {
            store: CorpusStore::new(config.load_manifest()?),
            config: config.stream_config(),
            plan,
            digest: actual,
            vocab,
            cursor: Some(StreamCursor::default()),
        })
    }

    /// [`Session::open_plan`] with the config file and, optionally, a plan
    /// file. Without a plan file the plan is computed from the manifest, as
    /// `nlpl build` does.
    pub fn open_plan_files(&self, config_path: &Path, plan_path: Option<&Path>, expected_digest: Option<&str>) -> Result<PlanHandle> {
        let mut config = PipelineConfig::load(config_path)?;
        config.apply_env()?;
        config.validate()?;
        let plan = match plan_path {
            Some(p) => StreamPlan::load(p)?,
            None => config.plan(&config.load_manifest()?)?,
        };
        self.open_plan(&config, plan, expected_digest)
    }
}

/// An open stream. Batches continue where the previous one ended.
pub struct PlanHandle {
    plan: StreamPlan,
    digest: String,
    store: CorpusStore,
    vocab: Arc<SubwordVocabulary>,
    config: StreamConfig,
    /// `None` after an error; the handle is then unusable.
    cursor: Option<StreamCursor>,
}

impl PlanHandle {
    pub fn plan(&self) -> &StreamPlan {
        &self.plan
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    /// Examples handed out so far.
    pub fn position(&self) -> u64 {
        self.cursor.as_ref().map_or(self.plan.epoch_size, StreamCursor::position)
    }

    /// Up to `batch_size` further examples; fewer only at the end of the
    /// epoch. Errors once the epoch is exhausted.
    pub fn next_batch(&mut self, batch_size: usize) -> Result<BridgeBatch> {
        if batch_size == 0 {
            return Err(BridgeError::EmptyBatch);
        }
        let cursor = match self.cursor.take() {
            Some(c) if c.position() < self.plan.epoch_size => c,
            _ => return Err(BridgeError::Exhausted(self.plan.epoch_size)),
        };
        let mut stream = ExampleStream::resume(&self.plan, &self.store, &self.vocab, self.config.clone(), cursor);
        let examples = stream.by_ref().take(batch_size).collect::<std::result::Result<Vec<_>, _>>()?;
        self.cursor = Some(stream.into_cursor());
        Ok(BridgeBatch::from_examples(examples.iter().map(|(i, ex)| (*i, ex))))
    }
}
