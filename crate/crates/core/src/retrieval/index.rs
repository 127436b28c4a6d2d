use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{rank_order, tokenize, RetrievalError};
use crate::corpus::{KnowledgeBase, RetrieverKind};

/// Lucene-style BM25 parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 0.9, b: 0.4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: u32,
    pub tf: u32,
}

/// Term postings and length statistics for one KB. Postings lists are sorted
/// by document ordinal; a term's document frequency is its postings length.
#[derive(Debug, Clone, PartialEq)]
pub struct InvertedIndex {
    pub(crate) params: Bm25Params,
    pub(crate) doc_ids: Vec<String>,
    pub(crate) doc_lengths: Vec<u32>,
    pub(crate) avg_doc_length: f64,
    pub(crate) postings: BTreeMap<String, Vec<Posting>>,
}

impl InvertedIndex {
    pub(crate) fn from_parts(
        params: Bm25Params,
        doc_ids: Vec<String>,
        doc_lengths: Vec<u32>,
        postings: BTreeMap<String, Vec<Posting>>,
    ) -> Self {
        let total: u64 = doc_lengths.iter().map(|&l| u64::from(l)).sum();
        let avg_doc_length = total as f64 / doc_lengths.len().max(1) as f64;
        InvertedIndex {
            params,
            doc_ids,
            doc_lengths,
            avg_doc_length,
            postings,
        }
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn doc_id(&self, ordinal: u32) -> &str {
        &self.doc_ids[ordinal as usize]
    }

    pub fn doc_lengths(&self) -> &[u32] {
        &self.doc_lengths
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.avg_doc_length
    }

    pub fn doc_freq(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.postings.get(term).map_or(&[], Vec::as_slice)
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    fn idf(&self, df: usize) -> f64 {
        let n = self.doc_count() as f64;
        let df = df as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    /// Contribution of one term with frequency `tf` and document frequency `df`
    /// to the score of document `doc`.
    fn term_weight(&self, df: usize, tf: u32, doc: u32) -> f64 {
        let Bm25Params { k1, b } = self.params;
        let tf = f64::from(tf);
        let len = f64::from(self.doc_lengths[doc as usize]);
        let norm = k1 * (1.0 - b + b * len / self.avg_doc_length);
        self.idf(df) * tf * (k1 + 1.0) / (tf + norm)
    }

    /// Top `k` documents with positive score, as `(ordinal, score)` in rank order.
    ///
    /// Repeated query terms count once; accumulation follows first-occurrence
    /// order so the sums agree bit-for-bit with [`bm25_score`].
    pub fn search(&self, query_terms: &[String], k: usize) -> Vec<(u32, f64)> {
        let mut scores: HashMap<u32, f64> = HashMap::new();
        for term in unique_terms(query_terms) {
            let postings = self.postings(term);
            let df = postings.len();
            for p in postings {
                *scores.entry(p.doc).or_insert(0.0) += self.term_weight(df, p.tf, p.doc);
            }
        }
        let mut hits: Vec<(u32, f64)> = scores.into_iter().filter(|&(_, s)| s > 0.0).collect();
        hits.sort_by(|a, b| rank_order((self.doc_id(a.0), a.1), (self.doc_id(b.0), b.1)));
        hits.truncate(k);
        hits
    }
}

fn unique_terms(terms: &[String]) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::with_capacity(terms.len());
    for t in terms {
        if !out.contains(&t.as_str()) {
            out.push(t);
        }
    }
    out
}

/// BM25 score of one document; terms absent from the corpus contribute 0.
pub fn bm25_score(index: &InvertedIndex, query_terms: &[String], doc: u32) -> f64 {
    let mut score = 0.0;
    for term in unique_terms(query_terms) {
        let postings = index.postings(term);
        if let Ok(pos) = postings.binary_search_by_key(&doc, |p| p.doc) {
            score += index.term_weight(postings.len(), postings[pos].tf, doc);
        }
    }
    score
}

/// Indexes `title + " " + text` of every document with default BM25 parameters.
pub fn build_index(kb: &KnowledgeBase) -> Result<InvertedIndex, RetrievalError> {
    build_index_with(kb, Bm25Params::default())
}

pub fn build_index_with(
    kb: &KnowledgeBase,
    params: Bm25Params,
) -> Result<InvertedIndex, RetrievalError> {
    if kb.retriever_kind != RetrieverKind::Indexed {
        return Err(RetrievalError::NotIndexed(kb.name.clone()));
    }
    if kb.documents.is_empty() {
        return Err(RetrievalError::EmptyKnowledgeBase(kb.name.clone()));
    }
    // Per-document counting runs in parallel; the merge walks documents in
    // ordinal order so postings come out sorted and the result is independent
    // of thread scheduling.
    let counted: Vec<(u32, Vec<(String, u32)>)> = kb
        .documents
        .par_iter()
        .map(|doc| {
            let tokens = tokenize(&doc.indexed_text());
            let mut counts: BTreeMap<String, u32> = BTreeMap::new();
            for t in &tokens {
                *counts.entry(t.clone()).or_insert(0) += 1;
            }
            (tokens.len() as u32, counts.into_iter().collect())
        })
        .collect();

    let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    let mut doc_lengths = Vec::with_capacity(counted.len());
    for (ord, (len, counts)) in counted.into_iter().enumerate() {
        doc_lengths.push(len);
        for (term, tf) in counts {
            postings.entry(term).or_default().push(Posting {
                doc: ord as u32,
                tf,
            });
        }
    }
    let doc_ids = kb.documents.iter().map(|d| d.id.clone()).collect();
    Ok(InvertedIndex::from_parts(
        params,
        doc_ids,
        doc_lengths,
        postings,
    ))
}
