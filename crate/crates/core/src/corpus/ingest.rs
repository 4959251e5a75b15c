//! Streaming JSONL ingestion.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use super::manifest::CorpusManifest;
use super::records::{CorpusKind, Record};
use super::CorpusError;
use crate::rng::fnv1a;

/// A corpus is rejected when more than this fraction of its lines is malformed.
pub const MAX_MALFORMED_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestStats {
    /// Non-blank lines read.
    pub lines: u64,
    pub accepted: u64,
    pub malformed: u64,
    /// Lines byte-identical to an earlier line (still ingested).
    pub duplicate_lines: u64,
}

impl IngestStats {
    pub fn rejected(&self) -> bool {
        self.lines > 0 && self.malformed as f64 > MAX_MALFORMED_FRACTION * self.lines as f64
    }
}

/// Iterator over the validated records of one JSONL file, in file order.
///
/// Malformed lines are skipped and counted. Once the input is exhausted the
/// reader yields a single [`CorpusError::Rejected`] if the malformed share
/// exceeds [`MAX_MALFORMED_FRACTION`].
pub struct CorpusReader<R> {
    lines: std::io::Lines<R>,
    kind: CorpusKind,
    path: PathBuf,
    stats: IngestStats,
    seen: HashSet<u64>,
    line_no: u64,
    finished: bool,
}

impl CorpusReader<BufReader<File>> {
    pub fn open(path: &Path, kind: CorpusKind) -> Result<Self, CorpusError> {
        let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
        Ok(Self::new(BufReader::new(file), kind, path))
    }
}

impl<R: BufRead> CorpusReader<R> {
    pub fn new(reader: R, kind: CorpusKind, path: &Path) -> Self {
        Self {
            lines: reader.lines(),
            kind,
            path: path.to_path_buf(),
            stats: IngestStats::default(),
            seen: HashSet::new(),
            line_no: 0,
            finished: false,
        }
    }

    pub fn stats(&self) -> &IngestStats {
        &self.stats
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Result<Record, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        loop {
            let line = match self.lines.next() {
                Some(Ok(line)) => line,
                Some(Err(e)) => {
                    self.finished = true;
                    return Some(Err(CorpusError::io(&self.path, e)));
                }
                None => {
                    self.finished = true;
                    if self.stats.rejected() {
                        return Some(Err(CorpusError::Rejected {
                            path: self.path.clone(),
                            malformed: self.stats.malformed,
                            lines: self.stats.lines,
                        }));
                    }
                    return None;
                }
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            self.stats.lines += 1;
            if !self.seen.insert(fnv1a(line.as_bytes())) {
                self.stats.duplicate_lines += 1;
            }
            match Record::parse(&line, self.kind) {
                Ok(record) => {
                    self.stats.accepted += 1;
                    return Some(Ok(record));
                }
                Err(reason) => {
                    log::debug!("{}:{}: skipped: {reason}", self.path.display(), self.line_no);
                    self.stats.malformed += 1;
                }
            }
        }
    }
}

/// Reads a whole corpus and records its size in `manifest`.
pub fn ingest(
    path: &Path,
    kind: CorpusKind,
    corpus_id: &str,
    manifest: &mut CorpusManifest,
) -> Result<(Vec<Record>, IngestStats), CorpusError> {
    let mut reader = CorpusReader::open(path, kind)?;
    let records = reader.by_ref().collect::<Result<Vec<_>, _>>()?;
    let stats = reader.stats().clone();
    manifest.set_count(corpus_id, records.len() as u64)?;
    Ok((records, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn read(text: &str, kind: CorpusKind) -> (Vec<Result<Record, CorpusError>>, IngestStats) {
        let mut r = CorpusReader::new(Cursor::new(text.to_string()), kind, Path::new("mem"));
        let out: Vec<_> = r.by_ref().collect();
        (out, r.stats().clone())
    }

    #[test]
    fn three_valid_documents() {
        let text = r#"{"id":"1","text":"a","lang":"en","kind":"NL"}
{"id":"2","text":"b","lang":"en","kind":"NL"}
{"id":"3","text":"c","lang":"en","kind":"NL"}
"#;
        let (out, stats) = read(text, CorpusKind::Document);
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(Result::is_ok));
        assert_eq!(stats.accepted, 3);
        assert_eq!(stats.malformed, 0);
    }

    #[test]
    fn empty_text_is_skipped() {
        let mut text = String::new();
        for i in 0..10 {
            text.push_str(&format!(
                "{{\"id\":\"{i}\",\"text\":\"t{i}\",\"lang\":\"en\",\"kind\":\"NL\"}}\n"
            ));
        }
        text.push_str(r#"{"id":"x","text":"","lang":"en","kind":"NL"}"#);
        let (out, stats) = read(&text, CorpusKind::Document);
        assert_eq!(stats.malformed, 1);
        assert_eq!(out.len(), 10);
        assert!(out.iter().all(Result::is_ok));
    }

    #[test]
    fn too_many_malformed_lines_reject_the_corpus() {
        let text = "{\"id\":\"1\",\"text\":\"a\",\"lang\":\"en\",\"kind\":\"NL\"}\nnot json\n";
        let (out, stats) = read(text, CorpusKind::Document);
        assert!(stats.rejected());
        assert!(matches!(out.last(), Some(Err(CorpusError::Rejected { .. }))));
    }

    #[test]
    fn exactly_ten_percent_is_tolerated() {
        let mut text = String::new();
        for i in 0..9 {
            text.push_str(&format!(
                "{{\"id\":\"{i}\",\"text\":\"t\",\"lang\":\"en\",\"kind\":\"NL\"}}\n"
            ));
        }
        text.push_str("garbage\n");
        let (out, stats) = read(&text, CorpusKind::Document);
        assert!(!stats.rejected());
        assert!(out.iter().all(Result::is_ok));
        assert_eq!(stats.duplicate_lines, 0);
    }

    #[test]
    fn duplicate_lines_are_counted() {
        let line = "{\"id\":\"1\",\"text\":\"a\",\"lang\":\"en\",\"kind\":\"NL\"}\n";
        let (out, stats) = read(&line.repeat(3), CorpusKind::Document);
        assert_eq!(out.len(), 3);
        assert_eq!(stats.duplicate_lines, 2);
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = CorpusReader::open(Path::new("/nonexistent/x.jsonl"), CorpusKind::Document);
        assert!(matches!(err, Err(CorpusError::Io { .. })));
    }
}
