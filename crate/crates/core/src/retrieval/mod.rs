//! Document retrieval: a BM25 inverted index for plain-text KBs, plus the
//! non-indexed retrievers (recorded fixtures and a live web search client)
//! whose hits carry rank-derived scores.

mod fixture;
mod index;
mod snapshot;
mod web;

pub use fixture::FixtureRetriever;
pub use index::{bm25_score, build_index, Bm25Params, InvertedIndex, Posting};
pub use snapshot::{load_snapshot, save_snapshot, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};
pub use web::{WebSearchConfig, WebSearchRetriever};

use std::cmp::Ordering;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Claim, CorpusError, Document, KnowledgeBase, RetrieverKind};

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("knowledge base {0:?} has no documents to index")]
    EmptyKnowledgeBase(String),
    #[error("knowledge base {0:?} is not an indexed KB")]
    NotIndexed(String),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("retriever unavailable: {0}")]
    RetrieverUnavailable(String),
    #[error("{path}: {message}")]
    Snapshot { path: PathBuf, message: String },
    #[error("{path}: unsupported snapshot version {found} (expected {expected})")]
    SnapshotVersion {
        path: PathBuf,
        found: u32,
        expected: u32,
    },
    #[error("snapshot does not match knowledge base {0:?}")]
    SnapshotMismatch(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Lowercased alphanumeric runs; no stemming, no stopwords.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalEntry {
    pub doc_id: String,
    pub score: f64,
}

/// Ranked documents for one claim: score descending, then id ascending.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RetrievalResult {
    pub entries: Vec<RetrievalEntry>,
    pub max_score: f64,
}

pub(crate) fn rank_order(a: (&str, f64), b: (&str, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0))
}

impl RetrievalResult {
    /// Sorts `entries` into rank order and keeps the first `k`.
    pub fn from_entries(mut entries: Vec<RetrievalEntry>, k: usize) -> Self {
        entries.sort_by(|a, b| rank_order((&a.doc_id, a.score), (&b.doc_id, b.score)));
        entries.truncate(k);
        let max_score = entries.first().map_or(0.0, |e| e.score);
        RetrievalResult { entries, max_score }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Merges results from several retrievers without truncation.
    pub fn merge(parts: impl IntoIterator<Item = RetrievalResult>) -> Self {
        let entries: Vec<_> = parts.into_iter().flat_map(|r| r.entries).collect();
        let n = entries.len();
        Self::from_entries(entries, n)
    }
}

/// Anything that can turn a claim into ranked documents.
pub trait Retriever: Send + Sync {
    fn kind(&self) -> RetrieverKind;

    fn retrieve(
        &self,
        claim: &Claim,
        k: usize,
    ) -> Result<(RetrievalResult, Vec<Document>), RetrievalError>;
}

pub fn retrieve_top_k(
    retriever: &dyn Retriever,
    claim: &Claim,
    k: usize,
) -> Result<(RetrievalResult, Vec<Document>), RetrievalError> {
    if k == 0 {
        return Err(RetrievalError::InvalidK);
    }
    retriever.retrieve(claim, k)
}

/// Scores assigned by retrievers that only expose a ranking: the first of
/// `n` hits gets `n`, the last gets 1.
pub(crate) fn rank_scored(docs: Vec<Document>, k: usize) -> (RetrievalResult, Vec<Document>) {
    let docs: Vec<Document> = docs.into_iter().take(k).collect();
    let n = docs.len();
    let entries = docs
        .iter()
        .enumerate()
        .map(|(rank, d)| RetrievalEntry {
            doc_id: d.id.clone(),
            score: (n - rank) as f64,
        })
        .collect();
    let max_score = if n == 0 { 0.0 } else { n as f64 };
    (RetrievalResult { entries, max_score }, docs)
}

/// BM25 over an in-memory KB.
#[derive(Debug, Clone)]
pub struct IndexedRetriever {
    name: String,
    documents: Vec<Document>,
    index: InvertedIndex,
}

impl IndexedRetriever {
    pub fn new(kb: KnowledgeBase) -> Result<Self, RetrievalError> {
        let index = build_index(&kb)?;
        Ok(IndexedRetriever {
            name: kb.name,
            documents: kb.documents,
            index,
        })
    }

    /// Pairs a KB with a previously saved index, checking they describe the same documents.
    pub fn with_index(kb: KnowledgeBase, index: InvertedIndex) -> Result<Self, RetrievalError> {
        let aligned = index.doc_count() == kb.documents.len()
            && kb
                .documents
                .iter()
                .enumerate()
                .all(|(i, d)| index.doc_id(i as u32) == d.id);
        if !aligned {
            return Err(RetrievalError::SnapshotMismatch(kb.name));
        }
        Ok(IndexedRetriever {
            name: kb.name,
            documents: kb.documents,
            index,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn index(&self) -> &InvertedIndex {
        &self.index
    }
}

impl Retriever for IndexedRetriever {
    fn kind(&self) -> RetrieverKind {
        RetrieverKind::Indexed
    }

    fn retrieve(
        &self,
        claim: &Claim,
        k: usize,
    ) -> Result<(RetrievalResult, Vec<Document>), RetrievalError> {
        let hits = self.index.search(&tokenize(&claim.text), k);
        let docs = hits
            .iter()
            .map(|&(ord, _)| self.documents[ord as usize].clone())
            .collect();
        let entries = hits
            .into_iter()
            .map(|(ord, score)| RetrievalEntry {
                doc_id: self.index.doc_id(ord).to_string(),
                score,
            })
            .collect();
        Ok((RetrievalResult::from_entries(entries, k), docs))
    }
}
