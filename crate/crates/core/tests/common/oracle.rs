//! Brute-force versions of retrieval, evidence selection and the KB policies.
//! Nothing here uses the index, the pooled selector or the policy module.

use std::collections::HashMap;
use std::path::Path;

use kbcheck::evidence::EvidenceScorer;
use kbcheck::retrieval::RetrievalEntry;
use kbcheck::{
    Claim, ClaimOutcome, Document, EvidenceSentence, EvidenceSet, KbPolicy, RetrievalResult,
    VeracityClassifier,
};

pub const K1: f64 = 0.9;
pub const B: f64 = 0.4;

pub fn tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            cur.extend(ch.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn first_occurrence(terms: Vec<String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for t in terms {
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// A corpus held as plain token lists, scored by evaluating the BM25 formula
/// directly: document frequencies are counted by scanning every document.
pub struct BruteCorpus {
    ids: Vec<String>,
    toks: Vec<Vec<String>>,
    avgdl: f64,
}

impl BruteCorpus {
    pub fn new(docs: &[(String, String)]) -> Self {
        let toks: Vec<Vec<String>> = docs.iter().map(|(_, text)| tokens(text)).collect();
        let total: u64 = toks.iter().map(|t| t.len() as u64).sum();
        BruteCorpus {
            ids: docs.iter().map(|(id, _)| id.clone()).collect(),
            avgdl: total as f64 / docs.len().max(1) as f64,
            toks,
        }
    }

    /// Positive scores in rank order: score descending, then id ascending.
    pub fn rank(&self, query: &str, k: usize) -> Vec<(String, f64)> {
        let n = self.ids.len() as f64;
        let terms = first_occurrence(tokens(query));
        let dfs: Vec<f64> = terms
            .iter()
            .map(|term| self.toks.iter().filter(|ts| ts.contains(term)).count() as f64)
            .collect();
        let mut scored = Vec::new();
        for (d, id) in self.ids.iter().enumerate() {
            let mut score = 0.0;
            for (term, df) in terms.iter().zip(&dfs) {
                let tf = self.toks[d].iter().filter(|t| *t == term).count();
                if tf == 0 {
                    continue;
                }
                let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
                let tf = tf as f64;
                let len = self.toks[d].len() as f64;
                let norm = K1 * (1.0 - B + B * len / self.avgdl);
                score += idf * tf * (K1 + 1.0) / (tf + norm);
            }
            if score > 0.0 {
                scored.push((id.clone(), score));
            }
        }
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        scored.truncate(k);
        scored
    }
}

pub fn bm25_rank(docs: &[(String, String)], query: &str, k: usize) -> Vec<(String, f64)> {
    BruteCorpus::new(docs).rank(query, k)
}

pub enum OracleSource {
    Indexed(Vec<Document>),
    Hits(HashMap<String, Vec<Document>>),
}

pub struct OracleKb {
    pub name: String,
    pub source: OracleSource,
    pub k: usize,
}

impl OracleKb {
    pub fn indexed(name: &str, docs: Vec<Document>) -> Self {
        OracleKb {
            name: name.to_string(),
            source: OracleSource::Indexed(docs),
            k: 5,
        }
    }

    pub fn hits_from_file(name: &str, path: &Path) -> Self {
        #[derive(serde::Deserialize)]
        struct Line {
            claim_id: String,
            hits: Vec<Document>,
        }
        let text = std::fs::read_to_string(path).unwrap();
        let hits = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let line: Line = serde_json::from_str(l).unwrap();
                (line.claim_id, line.hits)
            })
            .collect();
        OracleKb {
            name: name.to_string(),
            source: OracleSource::Hits(hits),
            k: 10,
        }
    }

    pub fn retrieve(&self, claim: &Claim) -> (RetrievalResult, Vec<Document>) {
        match &self.source {
            OracleSource::Indexed(docs) => {
                let pairs: Vec<(String, String)> = docs
                    .iter()
                    .map(|d| {
                        let text = match &d.title {
                            Some(t) => format!("{t} {}", d.text),
                            None => d.text.clone(),
                        };
                        (d.id.clone(), text)
                    })
                    .collect();
                let ranked = bm25_rank(&pairs, &claim.text, self.k);
                let found = ranked
                    .iter()
                    .map(|(id, _)| docs.iter().find(|d| &d.id == id).unwrap().clone())
                    .collect();
                (result(ranked), found)
            }
            OracleSource::Hits(map) => {
                let hits: Vec<Document> = map
                    .get(&claim.id)
                    .map(|h| h.iter().take(self.k).cloned().collect())
                    .unwrap_or_default();
                let n = hits.len();
                let ranked = hits
                    .iter()
                    .enumerate()
                    .map(|(i, d)| (d.id.clone(), (n - i) as f64))
                    .collect();
                (result(ranked), hits)
            }
        }
    }
}

fn result(ranked: Vec<(String, f64)>) -> RetrievalResult {
    let max_score = ranked.first().map_or(0.0, |r| r.1);
    RetrievalResult {
        entries: ranked
            .into_iter()
            .map(|(doc_id, score)| RetrievalEntry { doc_id, score })
            .collect(),
        max_score,
    }
}

/// Scores each pooled sentence on its own, sorts the whole pool and keeps `n`.
pub fn evidence(
    claim: &Claim,
    pool: &[(Option<&str>, &Document)],
    scorer: &dyn EvidenceScorer,
    n: usize,
) -> EvidenceSet {
    let mut all = Vec::new();
    for (kb, doc) in pool {
        for (i, s) in doc.sentences().iter().enumerate() {
            let score = scorer.score_batch(&[(&claim.text, s)]).unwrap()[0];
            all.push(EvidenceSentence {
                kb: kb.map(str::to_string),
                doc_id: doc.id.clone(),
                sentence_index: i,
                text: s.clone(),
                score,
            });
        }
    }
    // stable: pool order survives among exact duplicates
    all.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.doc_id.cmp(&b.doc_id))
            .then_with(|| a.sentence_index.cmp(&b.sentence_index))
    });
    all.truncate(n);
    EvidenceSet {
        claim_id: claim.id.clone(),
        max_score: all.first().map_or(0.0, |s| s.score),
        sentences: all,
    }
}

pub struct Oracle<'a> {
    pub kbs: &'a [OracleKb],
    pub scorer: &'a dyn EvidenceScorer,
    pub classifier: &'a dyn VeracityClassifier,
    pub n: usize,
}

impl Oracle<'_> {
    fn kb(&self, name: &str) -> &OracleKb {
        self.kbs.iter().find(|k| k.name == name).unwrap()
    }

    fn in_registry_order<'b>(&'b self, names: &[String]) -> Vec<&'b OracleKb> {
        self.kbs
            .iter()
            .filter(|k| names.contains(&k.name))
            .collect()
    }

    pub fn gather(&self, claim: &Claim, kb: &OracleKb) -> (RetrievalResult, EvidenceSet) {
        let (r, docs) = kb.retrieve(claim);
        let pool: Vec<_> = docs.iter().map(|d| (Some(kb.name.as_str()), d)).collect();
        (r, evidence(claim, &pool, self.scorer, self.n))
    }

    fn outcome(
        &self,
        claim: &Claim,
        policy: &KbPolicy,
        chosen: Option<&str>,
        retrieval: RetrievalResult,
        evidence: EvidenceSet,
    ) -> ClaimOutcome {
        ClaimOutcome {
            claim_id: claim.id.clone(),
            policy: policy.clone(),
            chosen_kb: chosen.map(str::to_string),
            verdict: self.classifier.classify(&claim.text, &evidence).unwrap(),
            retrieval,
            evidence,
            failure: None,
            degraded_kbs: Vec::new(),
        }
    }

    pub fn run(&self, claims: &[Claim], policy: &KbPolicy) -> Vec<ClaimOutcome> {
        match policy {
            KbPolicy::Single(name) => claims
                .iter()
                .map(|c| {
                    let (r, e) = self.gather(c, self.kb(name));
                    self.outcome(c, policy, Some(name), r, e)
                })
                .collect(),
            KbPolicy::NoKb => claims
                .iter()
                .map(|c| {
                    self.outcome(
                        c,
                        policy,
                        None,
                        RetrievalResult::default(),
                        EvidenceSet::empty(&c.id),
                    )
                })
                .collect(),
            KbPolicy::Union(names) => claims
                .iter()
                .map(|c| {
                    let mut entries = Vec::new();
                    let mut docs = Vec::new();
                    for kb in self.in_registry_order(names) {
                        let (r, d) = kb.retrieve(c);
                        entries.extend(r.entries);
                        docs.extend(d.into_iter().map(|d| (kb.name.as_str(), d)));
                    }
                    entries.sort_by(|a, b| {
                        b.score
                            .total_cmp(&a.score)
                            .then_with(|| a.doc_id.cmp(&b.doc_id))
                    });
                    let retrieval = RetrievalResult {
                        max_score: entries.first().map_or(0.0, |e| e.score),
                        entries,
                    };
                    let pool: Vec<_> = docs.iter().map(|(kb, d)| (Some(*kb), d)).collect();
                    let e = evidence(c, &pool, self.scorer, self.n);
                    self.outcome(c, policy, None, retrieval, e)
                })
                .collect(),
            KbPolicy::BestEvidenceClaim(names) => claims
                .iter()
                .map(|c| {
                    let mut best: Option<(&str, RetrievalResult, EvidenceSet)> = None;
                    for kb in self.in_registry_order(names) {
                        let (r, e) = self.gather(c, kb);
                        if best.as_ref().is_none_or(|b| e.max_score > b.2.max_score) {
                            best = Some((&kb.name, r, e));
                        }
                    }
                    let (name, r, e) = best.unwrap();
                    self.outcome(c, policy, Some(name), r, e)
                })
                .collect(),
            KbPolicy::BestEvidenceTask(names) => {
                let mut best: Option<(&OracleKb, f64)> = None;
                for kb in self.in_registry_order(names) {
                    let total: f64 = claims.iter().map(|c| self.gather(c, kb).1.max_score).sum();
                    let mean = total / claims.len() as f64;
                    if best.is_none_or(|b| mean > b.1) {
                        best = Some((kb, mean));
                    }
                }
                let kb = best.unwrap().0;
                claims
                    .iter()
                    .map(|c| {
                        let (r, e) = self.gather(c, kb);
                        self.outcome(c, policy, Some(&kb.name), r, e)
                    })
                    .collect()
            }
        }
    }

    /// Mean over claims of each listed KB's max evidence score, in registry order.
    pub fn task_means(&self, claims: &[Claim], names: &[String]) -> Vec<(String, f64)> {
        self.in_registry_order(names)
            .into_iter()
            .map(|kb| {
                let total: f64 = claims.iter().map(|c| self.gather(c, kb).1.max_score).sum();
                (kb.name.clone(), total / claims.len() as f64)
            })
            .collect()
    }
}
