use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use super::{rank_scored, RetrievalError, RetrievalResult, Retriever};
use crate::corpus::{Claim, CorpusError, Document, RetrieverKind};

/// Replays recorded search hits: one JSON line per claim,
/// `{"claim_id": "...", "hits": [{"id", "title"?, "text"}, ...]}`.
///
/// Claims without a recorded line retrieve nothing.
#[derive(Debug, Clone, Default)]
pub struct FixtureRetriever {
    hits: HashMap<String, Vec<Document>>,
}

#[derive(Deserialize)]
struct FixtureLine {
    claim_id: String,
    hits: Vec<Document>,
}

impl FixtureRetriever {
    pub fn from_hits(hits: HashMap<String, Vec<Document>>) -> Self {
        FixtureRetriever { hits }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RetrievalError> {
        let path = path.as_ref();
        let io = |e: std::io::Error| CorpusError::Io {
            path: path.to_path_buf(),
            source: e,
        };
        let file = File::open(path).map_err(io)?;
        let mut hits = HashMap::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(io)?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: FixtureLine =
                serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: e.to_string(),
                })?;
            if hits.insert(parsed.claim_id.clone(), parsed.hits).is_some() {
                return Err(CorpusError::DuplicateId {
                    path: path.to_path_buf(),
                    line: i + 1,
                    id: parsed.claim_id,
                }
                .into());
            }
        }
        Ok(FixtureRetriever { hits })
    }
}

impl Retriever for FixtureRetriever {
    fn kind(&self) -> RetrieverKind {
        RetrieverKind::Fixture
    }

    fn retrieve(
        &self,
        claim: &Claim,
        k: usize,
    ) -> Result<(RetrievalResult, Vec<Document>), RetrievalError> {
        let docs = self.hits.get(&claim.id).cloned().unwrap_or_default();
        Ok(rank_scored(docs, k))
    }
}
