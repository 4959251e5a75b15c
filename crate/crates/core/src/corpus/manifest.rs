use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::records::{CorpusKind, Modality};
use super::CorpusError;
use crate::objectives::Task;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub corpus_id: String,
    pub path: PathBuf,
    pub kind: CorpusKind,
    pub modality: Modality,
    /// Language code, language pair ("en-es") or PL name.
    pub lang: String,
    #[serde(default)]
    pub sample_count: u64,
}

impl ManifestEntry {
    /// Monolingual corpora feed span corruption, everything else translation.
    pub fn task(&self) -> Task {
        match self.kind {
            CorpusKind::Document => Task::Sclm,
            CorpusKind::Parallel | CorpusKind::CodeDoc => Task::Ptlm,
        }
    }

    pub fn group(&self) -> CorpusGroup {
        CorpusGroup {
            modality: self.modality,
            task: self.task(),
        }
    }
}

/// Sampling group: corpora are rebalanced within their (modality, task) group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CorpusGroup {
    pub modality: Modality,
    pub task: Task,
}

impl std::fmt::Display for CorpusGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.modality.as_str(), self.task.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
    /// Directory that relative entry paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl CorpusManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Result<Self, CorpusError> {
        let manifest = Self {
            entries,
            base_dir: None,
        };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
        let mut manifest: CorpusManifest =
            serde_json::from_str(&text).map_err(|e| CorpusError::Manifest(e.to_string()))?;
        manifest.base_dir = path.parent().map(Path::to_path_buf);
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<(), CorpusError> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| CorpusError::io(path, e))
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let mut seen = HashSet::new();
        for e in &self.entries {
            if !seen.insert(e.corpus_id.as_str()) {
                return Err(CorpusError::Manifest(format!(
                    "duplicate corpus_id {:?}",
                    e.corpus_id
                )));
            }
        }
        Ok(())
    }

    pub fn get(&self, corpus_id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.corpus_id == corpus_id)
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        match &self.base_dir {
            Some(dir) if entry.path.is_relative() => dir.join(&entry.path),
            _ => entry.path.clone(),
        }
    }

    pub fn set_count(&mut self, corpus_id: &str, count: u64) -> Result<(), CorpusError> {
        let entry = self
            .entries
            .iter_mut()
            .find(|e| e.corpus_id == corpus_id)
            .ok_or_else(|| CorpusError::Manifest(format!("no corpus {corpus_id:?}")))?;
        entry.sample_count = count;
        Ok(())
    }

    /// Raw sample counts per group, keyed by corpus id.
    pub fn counts_by_group(&self) -> BTreeMap<CorpusGroup, BTreeMap<String, u64>> {
        let mut groups: BTreeMap<CorpusGroup, BTreeMap<String, u64>> = BTreeMap::new();
        for e in &self.entries {
            groups
                .entry(e.group())
                .or_default()
                .insert(e.corpus_id.clone(), e.sample_count);
        }
        groups
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsRow {
    pub corpus_id: String,
    pub group: String,
    pub lang: String,
    pub sample_count: u64,
    /// Share of the group's samples, in percent.
    pub percentage: f64,
}

/// Per-corpus sample counts and their percentage within each sampling group.
pub fn stats(manifest: &CorpusManifest) -> Result<Vec<StatsRow>, CorpusError> {
    if manifest.entries.is_empty() {
        return Err(CorpusError::EmptyManifest);
    }
    let mut totals: BTreeMap<CorpusGroup, u64> = BTreeMap::new();
    for e in &manifest.entries {
        *totals.entry(e.group()).or_default() += e.sample_count;
    }
    let mut rows: Vec<(CorpusGroup, StatsRow)> = manifest
        .entries
        .iter()
        .map(|e| {
            let total = totals[&e.group()];
            let percentage = if total == 0 {
                0.0
            } else {
                100.0 * e.sample_count as f64 / total as f64
            };
            (
                e.group(),
                StatsRow {
                    corpus_id: e.corpus_id.clone(),
                    group: e.group().to_string(),
                    lang: e.lang.clone(),
                    sample_count: e.sample_count,
                    percentage,
                },
            )
        })
        .collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn entry(id: &str, kind: CorpusKind, modality: Modality, n: u64) -> ManifestEntry {
        ManifestEntry {
            corpus_id: id.into(),
            path: PathBuf::from(format!("{id}.jsonl")),
            kind,
            modality,
            lang: "en".into(),
            sample_count: n,
        }
    }

    #[test]
    fn empty_manifest_is_an_error() {
        assert!(matches!(
            stats(&CorpusManifest::default()),
            Err(CorpusError::EmptyManifest)
        ));
    }

    #[test]
    fn single_corpus_is_everything() {
        let m = CorpusManifest::new(vec![entry("a", CorpusKind::Document, Modality::Nl, 7)])
            .unwrap();
        let rows = stats(&m).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].percentage, 100.0);
    }

    #[test]
    fn equal_counts_split_evenly() {
        let m = CorpusManifest::new(vec![
            entry("a", CorpusKind::Document, Modality::Nl, 10),
            entry("b", CorpusKind::Document, Modality::Nl, 10),
        ])
        .unwrap();
        let rows = stats(&m).unwrap();
        assert_eq!(rows[0].percentage, 50.0);
        assert_eq!(rows[1].percentage, 50.0);
    }

    #[test]
    fn groups_are_normalized_separately() {
        let m = CorpusManifest::new(vec![
            entry("a", CorpusKind::Document, Modality::Nl, 10),
            entry("b", CorpusKind::Parallel, Modality::Nl, 30),
            entry("c", CorpusKind::Document, Modality::Pl, 5),
            entry("d", CorpusKind::Document, Modality::Pl, 15),
        ])
        .unwrap();
        let rows = stats(&m).unwrap();
        let get = |id: &str| rows.iter().find(|r| r.corpus_id == id).unwrap().percentage;
        assert_eq!(get("a"), 100.0);
        assert_eq!(get("b"), 100.0);
        assert_eq!(get("c"), 25.0);
        assert_eq!(get("d"), 75.0);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = CorpusManifest::new(vec![
            entry("a", CorpusKind::Document, Modality::Nl, 1),
            entry("a", CorpusKind::Document, Modality::Nl, 1),
        ]);
        assert!(err.is_err());
    }
}
