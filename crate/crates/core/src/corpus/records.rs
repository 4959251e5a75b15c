//! Corpus record types and their JSONL wire forms.

use serde::{Deserialize, Serialize};

use super::registry::{is_language_code, ProgrammingLanguage, TEXT_LABEL, UNKNOWN_LANG};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Modality {
    #[serde(rename = "NL")]
    Nl,
    #[serde(rename = "PL")]
    Pl,
}

impl Modality {
    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Nl => "NL",
            Modality::Pl => "PL",
        }
    }
}

/// Which JSONL schema a corpus file uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusKind {
    Document,
    Parallel,
    CodeDoc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairModality {
    #[serde(rename = "NL_NL")]
    NlNl,
    #[serde(rename = "NL_PL")]
    NlPl,
}

/// Monolingual text or code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub lang: String,
    pub kind: Modality,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pl_name: Option<ProgrammingLanguage>,
}

/// A bilingual pair; either side may be a programming language for `NL_PL`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelPair {
    pub id: String,
    #[serde(rename = "src")]
    pub source_text: String,
    #[serde(rename = "src_lang")]
    pub source_lang: String,
    #[serde(rename = "tgt")]
    pub target_text: String,
    #[serde(rename = "tgt_lang")]
    pub target_lang: String,
    pub modality: PairModality,
}

/// Code with its paired docstring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeDoc {
    pub id: String,
    pub code: String,
    pub docstring: String,
    pub pl_name: ProgrammingLanguage,
    #[serde(default = "text_label")]
    pub nl_lang: String,
    #[serde(rename = "nl_conf", default, skip_serializing_if = "Option::is_none")]
    pub nl_confidence: Option<f64>,
}

fn text_label() -> String {
    TEXT_LABEL.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Record {
    Document(Document),
    Parallel(ParallelPair),
    CodeDoc(CodeDoc),
}

impl Record {
    pub fn id(&self) -> &str {
        match self {
            Record::Document(d) => &d.id,
            Record::Parallel(p) => &p.id,
            Record::CodeDoc(c) => &c.id,
        }
    }

    /// Parses and validates one JSONL line of the given kind.
    pub fn parse(line: &str, kind: CorpusKind) -> Result<Record, String> {
        let record = match kind {
            CorpusKind::Document => {
                Record::Document(serde_json::from_str(line).map_err(|e| e.to_string())?)
            }
            CorpusKind::Parallel => {
                Record::Parallel(serde_json::from_str(line).map_err(|e| e.to_string())?)
            }
            CorpusKind::CodeDoc => {
                Record::CodeDoc(serde_json::from_str(line).map_err(|e| e.to_string())?)
            }
        };
        record.validate()?;
        Ok(record)
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            Record::Document(d) => d.validate(),
            Record::Parallel(p) => p.validate(),
            Record::CodeDoc(c) => c.validate(),
        }
    }
}

fn is_pl(label: &str) -> bool {
    ProgrammingLanguage::from_name(label).is_some()
}

impl Document {
    pub fn validate(&self) -> Result<(), String> {
        if self.text.trim().is_empty() {
            return Err("empty text".into());
        }
        match (self.kind, self.pl_name) {
            (Modality::Pl, None) => return Err("PL document without pl_name".into()),
            (Modality::Nl, Some(_)) => return Err("NL document with pl_name".into()),
            _ => {}
        }
        let lang_ok = self.lang == UNKNOWN_LANG
            || is_language_code(&self.lang)
            || self.pl_name.map(|pl| pl.name() == self.lang).unwrap_or(false);
        if !lang_ok {
            return Err(format!("unknown language {:?}", self.lang));
        }
        Ok(())
    }
}

impl ParallelPair {
    pub fn validate(&self) -> Result<(), String> {
        if self.source_text.trim().is_empty() || self.target_text.trim().is_empty() {
            return Err("empty side".into());
        }
        let nl_ok = |l: &str| is_language_code(l) || l == TEXT_LABEL;
        match self.modality {
            PairModality::NlNl => {
                if !is_language_code(&self.source_lang) || !is_language_code(&self.target_lang) {
                    return Err("NL_NL pair needs two language codes".into());
                }
            }
            PairModality::NlPl => {
                let ok = (is_pl(&self.source_lang) && nl_ok(&self.target_lang))
                    || (nl_ok(&self.source_lang) && is_pl(&self.target_lang));
                if !ok {
                    return Err("NL_PL pair needs exactly one PL side".into());
                }
            }
        }
        Ok(())
    }
}

impl CodeDoc {
    pub fn validate(&self) -> Result<(), String> {
        if self.code.trim().is_empty() {
            return Err("empty code".into());
        }
        if self.nl_lang != TEXT_LABEL {
            if !is_language_code(&self.nl_lang) {
                return Err(format!("unknown language {:?}", self.nl_lang));
            }
            match self.nl_confidence {
                Some(c) if (0.0..=1.0).contains(&c) => {}
                Some(_) => return Err("nl_conf outside [0,1]".into()),
                None => return Err("nl_conf required when nl_lang is set".into()),
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn document_schema() {
        let r = Record::parse(
            r#"{"id":"1","text":"hola","lang":"es","kind":"NL"}"#,
            CorpusKind::Document,
        )
        .unwrap();
        assert_eq!(r.id(), "1");
        assert!(Record::parse(
            r#"{"id":"1","text":"  ","lang":"es","kind":"NL"}"#,
            CorpusKind::Document
        )
        .is_err());
        assert!(Record::parse(
            r#"{"id":"1","text":"x","lang":"es","kind":"PL"}"#,
            CorpusKind::Document
        )
        .is_err());
        assert!(Record::parse(
            r#"{"id":"1","text":"x","lang":"unknown","kind":"PL","pl_name":"Go"}"#,
            CorpusKind::Document
        )
        .is_ok());
        assert!(Record::parse(
            r#"{"id":"1","text":"x","lang":"xx","kind":"NL"}"#,
            CorpusKind::Document
        )
        .is_err());
    }

    #[test]
    fn pair_schema() {
        let ok = r#"{"id":"p","src":"hello","src_lang":"en","tgt":"print(1)","tgt_lang":"Python","modality":"NL_PL"}"#;
        assert!(Record::parse(ok, CorpusKind::Parallel).is_ok());
        let both_nl = r#"{"id":"p","src":"hello","src_lang":"en","tgt":"hola","tgt_lang":"es","modality":"NL_PL"}"#;
        assert!(Record::parse(both_nl, CorpusKind::Parallel).is_err());
        let nlnl = r#"{"id":"p","src":"hello","src_lang":"en","tgt":"hola","tgt_lang":"es","modality":"NL_NL"}"#;
        assert!(Record::parse(nlnl, CorpusKind::Parallel).is_ok());
    }

    #[test]
    fn codedoc_schema() {
        let r = Record::parse(
            r#"{"id":"c","code":"def f(): pass","docstring":"","pl_name":"Python"}"#,
            CorpusKind::CodeDoc,
        )
        .unwrap();
        match r {
            Record::CodeDoc(c) => assert_eq!(c.nl_lang, "text"),
            _ => unreachable!(),
        }
        assert!(Record::parse(
            r#"{"id":"c","code":"x","docstring":"d","pl_name":"Python","nl_lang":"en"}"#,
            CorpusKind::CodeDoc
        )
        .is_err());
    }
}
