//! Claim tasks and knowledge bases, loaded from JSON-lines files.
//!
//! Task lines look like `{"id": "f1", "text": "...", "label": "SUPPORTED"}`
//! (label optional); KB lines look like `{"id": "w1", "title": "...", "text": "..."}`
//! (title optional). All text is NFC-normalized on load.

mod sentences;

pub use sentences::split_sentences;

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed line: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: unknown label {label:?}")]
    UnknownLabel {
        path: PathBuf,
        line: usize,
        label: String,
    },
    #[error("{path}:{line}: duplicate id {id:?}")]
    DuplicateId {
        path: PathBuf,
        line: usize,
        id: String,
    },
    #[error("{path}:{line}: claim text is empty")]
    EmptyClaim { path: PathBuf, line: usize },
    #[error("{path}:{line}: document text is empty")]
    EmptyDocument { path: PathBuf, line: usize },
    #[error("{0}: task contains no claims")]
    EmptyTask(PathBuf),
    #[error("{0}: knowledge base contains no documents")]
    EmptyKnowledgeBase(PathBuf),
    #[error("document text is empty")]
    EmptyText,
}

/// Veracity label. Serialized as `SUPPORTED`, `REFUTED` or `NOT_ENOUGH_INFO`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    Supported,
    Refuted,
    NotEnoughInfo,
}

impl Label {
    /// Row/column order used by confusion matrices and probability vectors.
    pub const ALL: [Label; 3] = [Label::Supported, Label::Refuted, Label::NotEnoughInfo];

    pub fn index(self) -> usize {
        match self {
            Label::Supported => 0,
            Label::Refuted => 1,
            Label::NotEnoughInfo => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Supported => "SUPPORTED",
            Label::Refuted => "REFUTED",
            Label::NotEnoughInfo => "NOT_ENOUGH_INFO",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "SUPPORTED" => Ok(Label::Supported),
            "REFUTED" => Ok(Label::Refuted),
            "NOT_ENOUGH_INFO" => Ok(Label::NotEnoughInfo),
            other => Err(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub id: String,
    pub text: String,
    #[serde(default, rename = "label", skip_serializing_if = "Option::is_none")]
    pub gold: Option<Label>,
}

impl Claim {
    pub fn new(id: impl Into<String>, text: impl Into<String>, gold: Option<Label>) -> Self {
        Claim {
            id: id.into(),
            text: nfc(&text.into()),
            gold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimTask {
    pub name: String,
    pub claims: Vec<Claim>,
}

impl ClaimTask {
    /// Gold label counts in [`Label::ALL`] order; unlabeled claims are not counted.
    pub fn class_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for claim in &self.claims {
            if let Some(label) = claim.gold {
                counts[label.index()] += 1;
            }
        }
        counts
    }

    /// Gold label shares in percent of the labeled claims.
    pub fn class_distribution(&self) -> [f64; 3] {
        let counts = self.class_counts();
        let total: usize = counts.iter().sum();
        if total == 0 {
            return [0.0; 3];
        }
        counts.map(|c| c as f64 * 100.0 / total as f64)
    }
}

/// A plain-text evidence unit with its sentences split eagerly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DocumentRecord", into = "DocumentRecord")]
pub struct Document {
    pub id: String,
    pub title: Option<String>,
    pub text: String,
    sentences: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DocumentRecord {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    title: Option<String>,
    text: String,
}

impl TryFrom<DocumentRecord> for Document {
    type Error = CorpusError;

    fn try_from(record: DocumentRecord) -> Result<Self, Self::Error> {
        Document::new(record.id, record.title, record.text)
    }
}

impl From<Document> for DocumentRecord {
    fn from(doc: Document) -> Self {
        DocumentRecord {
            id: doc.id,
            title: doc.title,
            text: doc.text,
        }
    }
}

impl Document {
    pub fn new(
        id: impl Into<String>,
        title: Option<String>,
        text: impl Into<String>,
    ) -> Result<Self, CorpusError> {
        let text = nfc(&text.into());
        if text.trim().is_empty() {
            return Err(CorpusError::EmptyText);
        }
        let sentences = split_sentences(&text);
        Ok(Document {
            id: id.into(),
            title: title.map(|t| nfc(&t)),
            text,
            sentences,
        })
    }

    pub fn sentences(&self) -> &[String] {
        &self.sentences
    }

    /// Title and body joined by a space; the unit that gets indexed.
    pub fn indexed_text(&self) -> String {
        match &self.title {
            Some(title) => format!("{title} {}", self.text),
            None => self.text.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetrieverKind {
    Indexed,
    WebSearch,
    Fixture,
}

impl RetrieverKind {
    /// Documents retrieved per claim unless configured otherwise.
    pub fn default_k(self) -> usize {
        match self {
            RetrieverKind::Indexed => 5,
            RetrieverKind::WebSearch | RetrieverKind::Fixture => 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBase {
    pub name: String,
    pub documents: Vec<Document>,
    pub retriever_kind: RetrieverKind,
}

impl KnowledgeBase {
    pub fn indexed(name: impl Into<String>, documents: Vec<Document>) -> Self {
        KnowledgeBase {
            name: name.into(),
            documents,
            retriever_kind: RetrieverKind::Indexed,
        }
    }
}

pub(crate) fn nfc(text: &str) -> String {
    text.nfc().collect()
}

fn io_err(path: &Path, source: std::io::Error) -> CorpusError {
    CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Iterates the non-blank lines of a JSON-lines file with 1-based line numbers.
fn json_lines<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<(usize, T)>, CorpusError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push((i + 1, value));
    }
    Ok(out)
}

#[derive(Deserialize)]
struct TaskLine {
    id: String,
    text: String,
    #[serde(default)]
    label: Option<String>,
}

/// Loads a claim task; the task name is the file stem.
pub fn load_task(path: impl AsRef<Path>) -> Result<ClaimTask, CorpusError> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    load_task_named(path, name)
}

pub fn load_task_named(
    path: impl AsRef<Path>,
    name: impl Into<String>,
) -> Result<ClaimTask, CorpusError> {
    let path = path.as_ref();
    let mut seen = HashSet::new();
    let mut claims = Vec::new();
    for (line, raw) in json_lines::<TaskLine>(path)? {
        let gold = match raw.label {
            None => None,
            Some(s) => Some(s.parse().map_err(|label| CorpusError::UnknownLabel {
                path: path.to_path_buf(),
                line,
                label,
            })?),
        };
        if raw.text.trim().is_empty() {
            return Err(CorpusError::EmptyClaim {
                path: path.to_path_buf(),
                line,
            });
        }
        if !seen.insert(raw.id.clone()) {
            return Err(CorpusError::DuplicateId {
                path: path.to_path_buf(),
                line,
                id: raw.id,
            });
        }
        claims.push(Claim::new(raw.id, raw.text, gold));
    }
    if claims.is_empty() {
        return Err(CorpusError::EmptyTask(path.to_path_buf()));
    }
    Ok(ClaimTask {
        name: name.into(),
        claims,
    })
}

pub fn load_kb(
    path: impl AsRef<Path>,
    name: impl Into<String>,
) -> Result<KnowledgeBase, CorpusError> {
    let path = path.as_ref();
    let mut seen = HashSet::new();
    let mut documents = Vec::new();
    for (line, raw) in json_lines::<DocumentRecord>(path)? {
        if !seen.insert(raw.id.clone()) {
            return Err(CorpusError::DuplicateId {
                path: path.to_path_buf(),
                line,
                id: raw.id,
            });
        }
        let doc =
            Document::new(raw.id, raw.title, raw.text).map_err(|_| CorpusError::EmptyDocument {
                path: path.to_path_buf(),
                line,
            })?;
        documents.push(doc);
    }
    if documents.is_empty() {
        return Err(CorpusError::EmptyKnowledgeBase(path.to_path_buf()));
    }
    Ok(KnowledgeBase::indexed(name, documents))
}

/// Writes documents back out in the KB line format.
pub fn write_kb(kb: &KnowledgeBase, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    for doc in &kb.documents {
        let line = serde_json::to_string(doc).expect("document serializes");
        writeln!(out, "{line}").map_err(|e| io_err(path, e))?;
    }
    out.flush().map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_labeled_claim() {
        let f = write_tmp(
            r#"{"id":"f1","text":"Ashley Cole plays the tuba.","label":"NOT_ENOUGH_INFO"}"#,
        );
        let task = load_task(f.path()).unwrap();
        assert_eq!(task.claims.len(), 1);
        assert_eq!(task.claims[0].gold, Some(Label::NotEnoughInfo));
        assert_eq!(task.claims[0].text, "Ashley Cole plays the tuba.");
    }

    #[test]
    fn unlabeled_claims_are_allowed() {
        let f = write_tmp("{\"id\":\"a\",\"text\":\"x\"}\n");
        let task = load_task(f.path()).unwrap();
        assert_eq!(task.claims[0].gold, None);
    }

    #[test]
    fn empty_task_is_rejected() {
        let f = write_tmp("");
        assert!(matches!(
            load_task(f.path()),
            Err(CorpusError::EmptyTask(_))
        ));
    }

    #[test]
    fn duplicate_id_reports_second_line() {
        let f = write_tmp("{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}\n");
        match load_task(f.path()) {
            Err(CorpusError::DuplicateId { line, id, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(id, "a");
            }
            other => panic!("expected duplicate id, got {other:?}"),
        }
    }

    #[test]
    fn unknown_label_is_rejected() {
        let f = write_tmp(r#"{"id":"a","text":"x","label":"DISPUTED"}"#);
        assert!(matches!(
            load_task(f.path()),
            Err(CorpusError::UnknownLabel { line: 1, .. })
        ));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let f = write_tmp("{\"id\":\"a\",\"text\":\"x\"}\nnot json\n");
        assert!(matches!(
            load_task(f.path()),
            Err(CorpusError::Malformed { line: 2, .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_task("/nonexistent/task.jsonl"),
            Err(CorpusError::Io { .. })
        ));
    }

    #[test]
    fn kb_counts_and_titles() {
        let f = write_tmp(concat!(
            "{\"id\":\"w1\",\"title\":\"Greenhouse gas\",\"text\":\"Water vapour is a greenhouse gas.\"}\n",
            "{\"id\":\"w2\",\"text\":\"Second.\"}\n",
            "{\"id\":\"w3\",\"text\":\"Third. With two sentences.\"}\n",
        ));
        let kb = load_kb(f.path(), "wiki").unwrap();
        assert_eq!(kb.documents.len(), 3);
        assert_eq!(kb.retriever_kind, RetrieverKind::Indexed);
        assert_eq!(kb.documents[0].title.as_deref(), Some("Greenhouse gas"));
        assert_eq!(kb.documents[2].sentences().len(), 2);
    }

    #[test]
    fn kb_empty_document_text() {
        let f = write_tmp("{\"id\":\"w1\",\"text\":\"   \"}\n");
        assert!(matches!(
            load_kb(f.path(), "kb"),
            Err(CorpusError::EmptyDocument { line: 1, .. })
        ));
    }

    #[test]
    fn kb_round_trip() {
        let f = write_tmp(concat!(
            "{\"id\":\"w1\",\"title\":\"T\",\"text\":\"A b. C d.\"}\n",
            "{\"id\":\"w2\",\"text\":\"E.\"}\n",
        ));
        let kb = load_kb(f.path(), "kb").unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_kb(&kb, out.path()).unwrap();
        let again = load_kb(out.path(), "kb").unwrap();
        assert_eq!(kb, again);
    }

    #[test]
    fn text_is_nfc_normalized() {
        // "e" followed by a combining acute accent
        let claim = Claim::new("c", "caf\u{0065}\u{0301}", None);
        assert_eq!(claim.text, "caf\u{00e9}");
    }

    #[test]
    fn label_strings() {
        for label in Label::ALL {
            let json = serde_json::to_string(&label).unwrap();
            assert_eq!(json, format!("\"{}\"", label.as_str()));
            assert_eq!(label.as_str().parse::<Label>().unwrap(), label);
        }
    }
}
