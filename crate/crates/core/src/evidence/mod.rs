//! Evidence sentence selection.
//!
//! Every sentence of every retrieved document is scored against the claim in
//! one batch, and the top `n` (default 5) by score become the evidence set.

mod remote;

pub use remote::{RemoteScorer, MAX_PAIRS_PER_REQUEST, SCORE_EVIDENCE_PATH};

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Claim, Document};
use crate::retrieval::tokenize;

pub const DEFAULT_EVIDENCE_COUNT: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScorerError {
    #[error("scorer unavailable: {0}")]
    Unavailable(String),
    #[error("scorer protocol error: {0}")]
    Protocol(String),
}

/// Scores `(claim, sentence)` pairs with the probability that the sentence is
/// evidence about the claim. Output has one score in `(0, 1)` per input pair.
pub trait EvidenceScorer: Send + Sync {
    fn score_batch(&self, pairs: &[(&str, &str)]) -> Result<Vec<f64>, ScorerError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceSentence {
    /// Knowledge base the sentence came from, when selection ran through a policy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kb: Option<String>,
    pub doc_id: String,
    pub sentence_index: usize,
    pub text: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvidenceSet {
    pub claim_id: String,
    pub sentences: Vec<EvidenceSentence>,
    pub max_score: f64,
}

impl EvidenceSet {
    pub fn empty(claim_id: impl Into<String>) -> Self {
        EvidenceSet {
            claim_id: claim_id.into(),
            sentences: Vec::new(),
            max_score: 0.0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.sentences.iter().map(|s| s.text.as_str()).collect()
    }
}

/// Retrieved documents from one knowledge base.
#[derive(Debug, Clone, Copy)]
pub struct EvidenceSource<'a> {
    pub kb: Option<&'a str>,
    pub docs: &'a [Document],
}

pub fn select_evidence(
    claim: &Claim,
    docs: &[Document],
    scorer: &dyn EvidenceScorer,
    n: usize,
) -> Result<EvidenceSet, ScorerError> {
    select_evidence_pooled(claim, &[EvidenceSource { kb: None, docs }], scorer, n)
}

/// Selects the top `n` sentences across documents pooled from several sources.
///
/// Order is score descending, then `(doc_id, sentence_index)` ascending, then
/// pool order for identical ids coming from different sources.
pub fn select_evidence_pooled(
    claim: &Claim,
    sources: &[EvidenceSource<'_>],
    scorer: &dyn EvidenceScorer,
    n: usize,
) -> Result<EvidenceSet, ScorerError> {
    let mut candidates = Vec::new();
    for source in sources {
        for doc in source.docs {
            for (i, sentence) in doc.sentences().iter().enumerate() {
                candidates.push(EvidenceSentence {
                    kb: source.kb.map(str::to_string),
                    doc_id: doc.id.clone(),
                    sentence_index: i,
                    text: sentence.clone(),
                    score: 0.0,
                });
            }
        }
    }
    if candidates.is_empty() {
        return Ok(EvidenceSet::empty(&claim.id));
    }

    let pairs: Vec<(&str, &str)> = candidates
        .iter()
        .map(|c| (claim.text.as_str(), c.text.as_str()))
        .collect();
    let scores = scorer.score_batch(&pairs)?;
    if scores.len() != candidates.len() {
        return Err(ScorerError::Protocol(format!(
            "expected {} scores, got {}",
            candidates.len(),
            scores.len()
        )));
    }
    for (c, s) in candidates.iter_mut().zip(scores) {
        if !(s > 0.0 && s < 1.0) {
            return Err(ScorerError::Protocol(format!("score {s} outside (0, 1)")));
        }
        c.score = s;
    }

    candidates.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.doc_id.cmp(&b.doc_id))
            .then_with(|| a.sentence_index.cmp(&b.sentence_index))
    });
    candidates.truncate(n);
    let max_score = candidates.first().map_or(0.0, |c| c.score);
    Ok(EvidenceSet {
        claim_id: claim.id.clone(),
        sentences: candidates,
        max_score,
    })
}

/// Token-set Jaccard overlap mapped affinely into `[0.02, 0.98]`.
pub fn lexical_score(claim: &str, sentence: &str) -> f64 {
    let a: HashSet<String> = tokenize(claim).into_iter().collect();
    let b: HashSet<String> = tokenize(sentence).into_iter().collect();
    let union = a.union(&b).count();
    let jaccard = if union == 0 {
        0.0
    } else {
        a.intersection(&b).count() as f64 / union as f64
    };
    0.02 + 0.96 * jaccard
}

/// Model-free scorer built on [`lexical_score`].
#[derive(Debug, Clone, Copy, Default)]
pub struct LexicalScorer;

impl EvidenceScorer for LexicalScorer {
    fn score_batch(&self, pairs: &[(&str, &str)]) -> Result<Vec<f64>, ScorerError> {
        Ok(pairs.iter().map(|(c, s)| lexical_score(c, s)).collect())
    }
}
