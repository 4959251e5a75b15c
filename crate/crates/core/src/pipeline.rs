//! Run configuration, batch building and batch file formats.
//!
//! Batches are written as JSONL (one [`PretrainExample`] per line, in stream
//! order) and/or as a compact binary file: the magic `ECPT1`, then for each
//! example `u32 input_len`, `u32 target_len`, the input ids and the target
//! ids, all little-endian.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CorpusError, CorpusManifest, Modality};
use crate::metrics::{MetricConfig, MetricError};
use crate::objectives::{PretrainExample, Task, DEFAULT_MEAN_SPAN, DEFAULT_NOISE_RATE};
use crate::sampler::{
    manifest_weights, plan_stream, CorpusStore, ExampleStream, SamplerError, StreamConfig, StreamPlan,
    DEFAULT_ALPHA, DEFAULT_TASK_MIX,
};
use crate::tokenizer::{SubwordVocabulary, TokenizerError};

pub const BINARY_MAGIC: &[u8; 5] = b"ECPT1";
pub const SEED_ENV: &str = "EC_SEED";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Tokenizer(#[from] TokenizerError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

impl PipelineError {
    /// True for errors in the configuration or invocation, as opposed to
    /// problems with the data being processed.
    pub fn is_usage(&self) -> bool {
        match self {
            PipelineError::Config(_) | PipelineError::Metric(_) | PipelineError::Tokenizer(_) => true,
            PipelineError::Io { .. } => false,
            PipelineError::Corpus(e) => matches!(
                e,
                CorpusError::EmptyManifest | CorpusError::Manifest(_) | CorpusError::InvalidInput(_)
            ),
            PipelineError::Sampler(e) => matches!(
                e,
                SamplerError::InvalidAlpha(_)
                    | SamplerError::InvalidProbabilities(_)
                    | SamplerError::EmptyModality(_)
                    | SamplerError::InvalidPlan(_)
            ),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub plan: Option<PathBuf>,
    pub jsonl: Option<PathBuf>,
    pub binary: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

/// Everything a run needs, loadable from one JSON file. Relative paths are
/// resolved against the directory of that file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub manifest: Option<PathBuf>,
    #[serde(default)]
    pub vocab: Option<PathBuf>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_len")]
    pub max_len: usize,
    /// Target length cap; defaults to `max_len`.
    #[serde(default)]
    pub target_cap: Option<usize>,
    #[serde(default = "default_task_mix")]
    pub task_mix: f64,
    #[serde(default)]
    pub sep_mode: bool,
    #[serde(default)]
    pub exempt_english: bool,
    #[serde(default = "default_noise_rate")]
    pub noise_rate: f64,
    #[serde(default = "default_mean_span")]
    pub mean_span: f64,
    #[serde(default = "default_epoch_size")]
    pub epoch_size: u64,
    #[serde(default)]
    pub metrics: MetricConfig,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}
fn default_max_len() -> usize {
    512
}
fn default_task_mix() -> f64 {
    DEFAULT_TASK_MIX
}
fn default_noise_rate() -> f64 {
    DEFAULT_NOISE_RATE
}
fn default_mean_span() -> f64 {
    DEFAULT_MEAN_SPAN
}
fn default_epoch_size() -> u64 {
    1000
}

impl Default for PipelineConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let mut cfg: PipelineConfig =
            serde_json::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Applies the `EC_SEED` environment override, if set.
    pub fn apply_env(&mut self) -> Result<(), PipelineError> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| PipelineError::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer")))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(SamplerError::InvalidAlpha(self.alpha).into());
        }
        if self.max_len != 512 && self.max_len != 1024 {
            return bad(format!("max_len must be 512 or 1024, got {}", self.max_len));
        }
        if let Some(cap) = self.target_cap {
            if cap == 0 {
                return bad("target_cap must be positive".into());
            }
        }
        if !(0.0..=1.0).contains(&self.task_mix) {
            return bad(format!("task_mix must lie in [0, 1], got {}", self.task_mix));
        }
        if !(0.0..1.0).contains(&self.noise_rate) || !(self.mean_span >= 1.0) {
            return bad("noise_rate must lie in [0, 1) and mean_span be at least 1".into());
        }
        if self.epoch_size == 0 {
            return bad("epoch_size must be positive".into());
        }
        self.metrics.validate()?;
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        match &self.base_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }

    pub fn manifest_path(&self) -> Result<PathBuf, PipelineError> {
        self.manifest
            .as_deref()
            .map(|p| self.resolve(p))
            .ok_or_else(|| PipelineError::Config("no manifest configured".into()))
    }

    pub fn vocab_path(&self) -> Result<PathBuf, PipelineError> {
        self.vocab
            .as_deref()
            .map(|p| self.resolve(p))
            .ok_or_else(|| PipelineError::Config("no vocab configured".into()))
    }

    pub fn load_manifest(&self) -> Result<CorpusManifest, PipelineError> {
        let path = self.manifest_path()?;
        if !path.exists() {
            return Err(PipelineError::Config(format!("manifest {} not found", path.display())));
        }
        Ok(CorpusManifest::load(&path)?)
    }

    pub fn load_vocab(&self) -> Result<SubwordVocabulary, PipelineError> {
        let path = self.vocab_path()?;
        if !path.exists() {
            return Err(PipelineError::Config(format!("vocab {} not found", path.display())));
        }
        Ok(SubwordVocabulary::load(&path)?)
    }

    pub fn stream_config(&self) -> StreamConfig {
        StreamConfig {
            max_len: self.max_len,
            target_cap: self.target_cap.unwrap_or(self.max_len),
            sep_mode: self.sep_mode,
            noise_rate: self.noise_rate,
            mean_span: self.mean_span,
            exempt_english: self.exempt_english,
        }
    }

    /// Stream plan from the manifest's sample counts.
    pub fn plan(&self, manifest: &CorpusManifest) -> Result<StreamPlan, PipelineError> {
        let (nl, pl) = manifest_weights(manifest, self.alpha)?;
        Ok(plan_stream(&nl, &pl, self.alpha, self.task_mix, self.seed, self.epoch_size)?)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BuildSummary {
    pub examples: u64,
    pub per_task: BTreeMap<String, u64>,
    pub per_modality: BTreeMap<String, u64>,
    pub per_corpus: BTreeMap<String, u64>,
}

impl BuildSummary {
    fn record(&mut self, index: u64, ex: &PretrainExample) {
        self.examples += 1;
        *self.per_task.entry(ex.task.as_str().to_string()).or_default() += 1;
        let m = StreamPlan::modality(index).as_str().to_string();
        *self.per_modality.entry(m).or_default() += 1;
        *self.per_corpus.entry(ex.corpus_id.clone()).or_default() += 1;
    }

    pub fn count(&self, task: Task) -> u64 {
        self.per_task.get(task.as_str()).copied().unwrap_or(0)
    }

    pub fn modality_count(&self, m: Modality) -> u64 {
        self.per_modality.get(m.as_str()).copied().unwrap_or(0)
    }
}

/// Builds the whole stream of `plan` with `workers` shards and returns the
/// examples in stream order. Each shard replays every draw but builds only
/// its own indices, so the result does not depend on `workers`.
pub fn build_examples(
    plan: &StreamPlan,
    store: &CorpusStore,
    vocab: &SubwordVocabulary,
    config: &StreamConfig,
    workers: usize,
) -> Result<Vec<(u64, PretrainExample)>, PipelineError> {
    let workers = workers.max(1) as u64;
    let shards: Vec<Result<Vec<(u64, PretrainExample)>, SamplerError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|k| {
                let config = config.clone();
                scope.spawn(move || ExampleStream::sharded(plan, store, vocab, config, k, workers).collect())
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("build worker panicked"))
            .collect()
    });
    let mut shards = shards.into_iter().collect::<Result<Vec<_>, _>>()?;
    let total: usize = shards.iter().map(Vec::len).sum();
    let mut iters: Vec<_> = shards.iter_mut().map(|s| std::mem::take(s).into_iter()).collect();
    let mut out = Vec::with_capacity(total);
    // Shard k holds indices k, k + w, k + 2w, ... in order.
    'merge: loop {
        for it in iters.iter_mut() {
            match it.next() {
                Some(item) => out.push(item),
                None => break 'merge,
            }
        }
    }
    for it in iters {
        out.extend(it);
    }
    debug_assert!(out.windows(2).all(|w| w[0].0 < w[1].0));
    Ok(out)
}

pub fn write_jsonl<W: Write>(mut w: W, examples: &[(u64, PretrainExample)]) -> std::io::Result<()> {
    for (_, ex) in examples {
        serde_json::to_writer(&mut w, ex)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn write_binary<W: Write>(mut w: W, examples: &[(u64, PretrainExample)]) -> std::io::Result<()> {
    w.write_all(BINARY_MAGIC)?;
    for (_, ex) in examples {
        w.write_all(&(ex.input_ids.len() as u32).to_le_bytes())?;
        w.write_all(&(ex.target_ids.len() as u32).to_le_bytes())?;
        for id in ex.input_ids.iter().chain(&ex.target_ids) {
            w.write_all(&id.to_le_bytes())?;
        }
    }
    w.flush()
}

/// Reads a binary batch file back into `(input_ids, target_ids)` pairs.
pub fn read_binary<R: Read>(mut r: R) -> std::io::Result<Vec<(Vec<u32>, Vec<u32>)>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let invalid = |m: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, m.to_string());
    let rest = bytes
        .strip_prefix(BINARY_MAGIC.as_slice())
        .ok_or_else(|| invalid("bad magic"))?;
    if rest.len() % 4 != 0 {
        return Err(invalid("truncated file"));
    }
    let words: Vec<u32> = rest
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < words.len() {
        if i + 2 > words.len() {
            return Err(invalid("truncated header"));
        }
        let (a, b) = (words[i] as usize, words[i + 1] as usize);
        i += 2;
        if i + a + b > words.len() {
            return Err(invalid("truncated example"));
        }
        out.push((words[i..i + a].to_vec(), words[i + a..i + a + b].to_vec()));
        i += a + b;
    }
    Ok(out)
}

/// Builds the stream and writes every configured output. With `dry_run`
/// nothing is written.
pub fn run_build(
    config: &PipelineConfig,
    plan: &StreamPlan,
    workers: usize,
    dry_run: bool,
) -> Result<BuildSummary, PipelineError> {
    let vocab = config.load_vocab()?;
    let store = CorpusStore::new(config.load_manifest()?);
    let examples = build_examples(plan, &store, &vocab, &config.stream_config(), workers)?;
    let mut summary = BuildSummary::default();
    for (i, ex) in &examples {
        summary.record(*i, ex);
    }
    if !dry_run {
        if let Some(p) = &config.output.jsonl {
            let p = config.resolve(p);
            let f = File::create(&p).map_err(io_err(&p))?;
            write_jsonl(BufWriter::new(f), &examples).map_err(io_err(&p))?;
        }
        if let Some(p) = &config.output.binary {
            let p = config.resolve(p);
            let f = File::create(&p).map_err(io_err(&p))?;
            write_binary(BufWriter::new(f), &examples).map_err(io_err(&p))?;
        }
    }
    Ok(summary)
}
