//! Corpus ingestion, hygiene and statistics.
//!
//! Three record schemas are supported: monolingual [`Document`]s, bilingual
//! [`ParallelPair`]s and code with docstrings ([`CodeDoc`]). Files are JSONL,
//! read as streams; malformed lines are skipped and counted.

mod ingest;
pub mod langid;
mod manifest;
mod records;
pub mod registry;
mod scrub;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use ingest::{ingest, CorpusReader, IngestStats, MAX_MALFORMED_FRACTION};
pub use langid::{bundled_profiles, identify_lang, LangProfile};
pub use manifest::{stats, CorpusGroup, CorpusManifest, ManifestEntry, StatsRow};
pub use records::{CodeDoc, CorpusKind, Document, Modality, PairModality, ParallelPair, Record};
pub use registry::{ProgrammingLanguage, TEXT_LABEL, UNKNOWN_LANG};
pub use scrub::{
    label_policy, scrub_leakage, ScrubDirection, LANG_CONFIDENCE_THRESHOLD, REMOVED_PLACEHOLDER,
};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: corpus rejected, {malformed} of {lines} lines malformed")]
    Rejected {
        path: PathBuf,
        malformed: u64,
        lines: u64,
    },
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error("manifest has no entries")]
    EmptyManifest,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
