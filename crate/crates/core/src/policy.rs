//! Knowledge-base strategies: one KB, a union of KBs, no KB, and KB selection
//! by evidence quality at task or claim level.
//!
//! Stage failures never escape a claim: they are recorded on the
//! [`ClaimOutcome`] and the verdict falls back to NotEnoughInfo.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Claim, ClaimTask, Document, RetrieverKind};
use crate::evidence::{
    select_evidence_pooled, EvidenceScorer, EvidenceSet, EvidenceSource, DEFAULT_EVIDENCE_COUNT,
};
use crate::retrieval::{retrieve_top_k, RetrievalResult, Retriever};
use crate::verdict::{VeracityClassifier, Verdict};

/// One KB's gathered evidence (or failure) for each claim of a task.
type GatherRow = (String, Vec<Result<Gathered, (RetrievalResult, Failure)>>);

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KbPolicy {
    Single(String),
    Union(Vec<String>),
    NoKb,
    BestEvidenceTask(Vec<String>),
    BestEvidenceClaim(Vec<String>),
}

impl KbPolicy {
    /// Short stable name, also used for result directories.
    pub fn label(&self) -> String {
        match self {
            KbPolicy::Single(kb) => format!("single-{kb}"),
            KbPolicy::Union(kbs) => format!("union-{}", kbs.join("+")),
            KbPolicy::NoKb => "none".to_string(),
            KbPolicy::BestEvidenceTask(kbs) => format!("best-task-{}", kbs.join("+")),
            KbPolicy::BestEvidenceClaim(kbs) => format!("best-claim-{}", kbs.join("+")),
        }
    }

    pub fn kb_names(&self) -> Vec<&str> {
        match self {
            KbPolicy::Single(kb) => vec![kb.as_str()],
            KbPolicy::NoKb => Vec::new(),
            KbPolicy::Union(kbs)
            | KbPolicy::BestEvidenceTask(kbs)
            | KbPolicy::BestEvidenceClaim(kbs) => kbs.iter().map(String::as_str).collect(),
        }
    }

    /// Every problem with this policy against `registry`; empty when valid.
    pub fn problems(&self, registry: &KbRegistry) -> Vec<String> {
        let known: Vec<&str> = registry.names().collect();
        self.problems_among(&known)
    }

    /// Like [`KbPolicy::problems`], against a plain list of KB names.
    pub fn problems_among(&self, known: &[&str]) -> Vec<String> {
        let mut out = Vec::new();
        let names = self.kb_names();
        if !matches!(self, KbPolicy::NoKb | KbPolicy::Single(_)) && names.is_empty() {
            out.push(format!("policy {}: KB list is empty", self.label()));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(*name) {
                out.push(format!("policy {}: KB {name:?} listed twice", self.label()));
            }
            if !known.contains(name) {
                out.push(format!("policy {}: unknown KB {name:?}", self.label()));
            }
        }
        out
    }
}

impl fmt::Display for KbPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailureKind {
    RetrieverUnavailable,
    ScorerUnavailable,
    ClassifierUnavailable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
}

/// Everything recorded for one claim under one policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimOutcome {
    pub claim_id: String,
    pub policy: KbPolicy,
    pub chosen_kb: Option<String>,
    pub retrieval: RetrievalResult,
    pub evidence: EvidenceSet,
    pub verdict: Verdict,
    pub failure: Option<Failure>,
    /// Union members whose retrieval failed while others succeeded.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degraded_kbs: Vec<String>,
}

impl ClaimOutcome {
    fn failed(
        claim: &Claim,
        policy: &KbPolicy,
        chosen_kb: Option<String>,
        retrieval: RetrievalResult,
        failure: Failure,
    ) -> Self {
        ClaimOutcome {
            claim_id: claim.id.clone(),
            policy: policy.clone(),
            chosen_kb,
            retrieval,
            evidence: EvidenceSet::empty(&claim.id),
            verdict: Verdict::not_enough_info(),
            failure: Some(failure),
            degraded_kbs: Vec::new(),
        }
    }
}

#[derive(Clone)]
pub struct KbEntry {
    pub name: String,
    pub retriever: Arc<dyn Retriever>,
    /// Documents retrieved per claim.
    pub k: usize,
}

/// Knowledge bases in configuration order; that order breaks selection ties.
#[derive(Clone, Default)]
pub struct KbRegistry {
    entries: Vec<KbEntry>,
}

impl KbRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a KB with the default `k` for its retriever kind.
    pub fn register(&mut self, name: impl Into<String>, retriever: Arc<dyn Retriever>) {
        let k = retriever.kind().default_k();
        self.register_with_k(name, retriever, k);
    }

    pub fn register_with_k(
        &mut self,
        name: impl Into<String>,
        retriever: Arc<dyn Retriever>,
        k: usize,
    ) {
        self.entries.push(KbEntry {
            name: name.into(),
            retriever,
            k,
        });
    }

    pub fn get(&self, name: &str) -> Option<&KbEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.name.as_str())
    }

    pub fn kind(&self, name: &str) -> Option<RetrieverKind> {
        self.get(name).map(|e| e.retriever.kind())
    }

    /// Registry entries for `names`, keeping registry order.
    fn ordered<'a>(&'a self, names: &[String]) -> Vec<&'a KbEntry> {
        self.entries
            .iter()
            .filter(|e| names.contains(&e.name))
            .collect()
    }
}

/// Retrieval plus evidence selection for one claim against one KB.
#[derive(Debug, Clone, PartialEq)]
pub struct Gathered {
    pub kb: String,
    pub retrieval: RetrievalResult,
    pub evidence: EvidenceSet,
}

/// The fixed three-stage pipeline over a registry of KBs.
pub struct Pipeline<'a> {
    pub registry: &'a KbRegistry,
    pub scorer: &'a dyn EvidenceScorer,
    pub classifier: &'a dyn VeracityClassifier,
    pub evidence_count: usize,
}

impl<'a> Pipeline<'a> {
    pub fn new(
        registry: &'a KbRegistry,
        scorer: &'a dyn EvidenceScorer,
        classifier: &'a dyn VeracityClassifier,
    ) -> Self {
        Pipeline {
            registry,
            scorer,
            classifier,
            evidence_count: DEFAULT_EVIDENCE_COUNT,
        }
    }

    fn entry(&self, name: &str) -> &'a KbEntry {
        self.registry
            .get(name)
            .unwrap_or_else(|| panic!("KB {name:?} is not registered"))
    }

    fn retrieve(
        &self,
        entry: &KbEntry,
        claim: &Claim,
    ) -> Result<(RetrievalResult, Vec<Document>), Failure> {
        retrieve_top_k(entry.retriever.as_ref(), claim, entry.k).map_err(|e| Failure {
            kind: FailureKind::RetrieverUnavailable,
            message: format!("{}: {e}", entry.name),
        })
    }

    fn evidence(
        &self,
        claim: &Claim,
        sources: &[EvidenceSource<'_>],
    ) -> Result<EvidenceSet, Failure> {
        select_evidence_pooled(claim, sources, self.scorer, self.evidence_count).map_err(|e| {
            Failure {
                kind: FailureKind::ScorerUnavailable,
                message: e.to_string(),
            }
        })
    }

    /// Retrieval and evidence selection against one KB, without classification.
    pub fn gather(&self, claim: &Claim, kb: &str) -> Result<Gathered, (RetrievalResult, Failure)> {
        let entry = self.entry(kb);
        let (retrieval, docs) = self
            .retrieve(entry, claim)
            .map_err(|f| (RetrievalResult::default(), f))?;
        let source = EvidenceSource {
            kb: Some(&entry.name),
            docs: &docs,
        };
        match self.evidence(claim, &[source]) {
            Ok(evidence) => Ok(Gathered {
                kb: entry.name.clone(),
                retrieval,
                evidence,
            }),
            Err(f) => Err((retrieval, f)),
        }
    }

    fn finish(
        &self,
        claim: &Claim,
        policy: &KbPolicy,
        chosen_kb: Option<String>,
        retrieval: RetrievalResult,
        evidence: EvidenceSet,
    ) -> ClaimOutcome {
        match self.classifier.classify(&claim.text, &evidence) {
            Ok(verdict) => ClaimOutcome {
                claim_id: claim.id.clone(),
                policy: policy.clone(),
                chosen_kb,
                retrieval,
                evidence,
                verdict,
                failure: None,
                degraded_kbs: Vec::new(),
            },
            Err(e) => {
                let mut out = ClaimOutcome::failed(
                    claim,
                    policy,
                    chosen_kb,
                    retrieval,
                    Failure {
                        kind: FailureKind::ClassifierUnavailable,
                        message: e.to_string(),
                    },
                );
                out.evidence = evidence;
                out
            }
        }
    }

    pub fn run_claim_single(&self, claim: &Claim, kb: &str) -> ClaimOutcome {
        let policy = KbPolicy::Single(kb.to_string());
        match self.gather(claim, kb) {
            Ok(g) => self.finish(claim, &policy, Some(g.kb), g.retrieval, g.evidence),
            Err((retrieval, failure)) => {
                ClaimOutcome::failed(claim, &policy, Some(kb.to_string()), retrieval, failure)
            }
        }
    }

    /// Pools each KB's own top-k documents and selects evidence across the pool.
    /// A KB whose retrieval fails is skipped and listed in `degraded_kbs`.
    pub fn run_claim_union(&self, claim: &Claim, kbs: &[String]) -> ClaimOutcome {
        let policy = KbPolicy::Union(kbs.to_vec());
        let mut results = Vec::new();
        let mut pooled: Vec<(&str, Vec<Document>)> = Vec::new();
        let mut degraded = Vec::new();
        let mut last_failure = None;
        for entry in self.registry.ordered(kbs) {
            match self.retrieve(entry, claim) {
                Ok((r, docs)) => {
                    results.push(r);
                    pooled.push((&entry.name, docs));
                }
                Err(f) => {
                    degraded.push(entry.name.clone());
                    last_failure = Some(f);
                }
            }
        }
        if pooled.is_empty() {
            let failure = last_failure.unwrap_or_else(|| Failure {
                kind: FailureKind::RetrieverUnavailable,
                message: "no knowledge base in union".into(),
            });
            let mut out =
                ClaimOutcome::failed(claim, &policy, None, RetrievalResult::default(), failure);
            out.degraded_kbs = degraded;
            return out;
        }
        let retrieval = RetrievalResult::merge(results);
        let sources: Vec<EvidenceSource<'_>> = pooled
            .iter()
            .map(|(kb, docs)| EvidenceSource { kb: Some(kb), docs })
            .collect();
        let mut out = match self.evidence(claim, &sources) {
            Ok(evidence) => self.finish(claim, &policy, None, retrieval, evidence),
            Err(f) => ClaimOutcome::failed(claim, &policy, None, retrieval, f),
        };
        out.degraded_kbs = degraded;
        out
    }

    pub fn run_claim_none(&self, claim: &Claim) -> ClaimOutcome {
        self.finish(
            claim,
            &KbPolicy::NoKb,
            None,
            RetrievalResult::default(),
            EvidenceSet::empty(&claim.id),
        )
    }

    /// Gathers evidence for every claim from every KB in `kbs` (registry order).
    /// Outer index is the KB, inner the claim.
    fn gather_matrix(&self, task: &ClaimTask, kbs: &[String]) -> Vec<GatherRow> {
        self.registry
            .ordered(kbs)
            .into_iter()
            .map(|entry| {
                let per_claim = task
                    .claims
                    .par_iter()
                    .map(|c| self.gather(c, &entry.name))
                    .collect();
                (entry.name.clone(), per_claim)
            })
            .collect()
    }

    /// KB with the highest mean (over claims) of the evidence set's max score.
    /// Failed or empty claims contribute 0; ties go to the earlier KB.
    pub fn select_kb_task(&self, task: &ClaimTask, kbs: &[String]) -> String {
        let matrix = self.gather_matrix(task, kbs);
        best_mean_kb(&matrix).to_string()
    }

    /// Evidence from every KB; the set with the highest max score wins, ties
    /// to the earlier KB. `None` when every KB failed.
    pub fn select_kb_claim(&self, claim: &Claim, kbs: &[String]) -> Option<Gathered> {
        self.select_kb_claim_detailed(claim, kbs).0
    }

    fn select_kb_claim_detailed(
        &self,
        claim: &Claim,
        kbs: &[String],
    ) -> (Option<Gathered>, Option<Failure>) {
        let mut best: Option<Gathered> = None;
        let mut last_failure = None;
        for entry in self.registry.ordered(kbs) {
            match self.gather(claim, &entry.name) {
                Ok(g) => {
                    if best
                        .as_ref()
                        .is_none_or(|b| g.evidence.max_score > b.evidence.max_score)
                    {
                        best = Some(g);
                    }
                }
                Err((_, f)) => last_failure = Some(f),
            }
        }
        (best, last_failure)
    }

    fn run_best_claim(&self, claim: &Claim, kbs: &[String]) -> ClaimOutcome {
        let policy = KbPolicy::BestEvidenceClaim(kbs.to_vec());
        match self.select_kb_claim_detailed(claim, kbs) {
            (Some(g), _) => self.finish(claim, &policy, Some(g.kb), g.retrieval, g.evidence),
            (None, failure) => {
                let failure = failure.unwrap_or_else(|| Failure {
                    kind: FailureKind::RetrieverUnavailable,
                    message: "no knowledge base to select from".into(),
                });
                ClaimOutcome::failed(claim, &policy, None, RetrievalResult::default(), failure)
            }
        }
    }

    pub fn run_claim(&self, claim: &Claim, policy: &KbPolicy) -> ClaimOutcome {
        match policy {
            KbPolicy::Single(kb) => self.run_claim_single(claim, kb),
            KbPolicy::Union(kbs) => self.run_claim_union(claim, kbs),
            KbPolicy::NoKb => self.run_claim_none(claim),
            KbPolicy::BestEvidenceClaim(kbs) => self.run_best_claim(claim, kbs),
            KbPolicy::BestEvidenceTask(_) => {
                // a lone claim is its own task
                let task = ClaimTask {
                    name: String::new(),
                    claims: vec![claim.clone()],
                };
                self.run_task(&task, policy).remove(0)
            }
        }
    }

    /// Runs every claim of `task` under `policy`, in claim order. Uses the
    /// current rayon pool; outcomes do not depend on scheduling.
    pub fn run_task(&self, task: &ClaimTask, policy: &KbPolicy) -> Vec<ClaimOutcome> {
        match policy {
            KbPolicy::BestEvidenceTask(kbs) => {
                let mut matrix = self.gather_matrix(task, kbs);
                let chosen = best_mean_kb(&matrix).to_string();
                let idx = matrix.iter().position(|(n, _)| *n == chosen).unwrap();
                let gathered = std::mem::take(&mut matrix[idx].1);
                task.claims
                    .par_iter()
                    .zip(gathered)
                    .map(|(claim, g)| match g {
                        Ok(g) => self.finish(
                            claim,
                            policy,
                            Some(chosen.clone()),
                            g.retrieval,
                            g.evidence,
                        ),
                        Err((retrieval, f)) => {
                            ClaimOutcome::failed(claim, policy, Some(chosen.clone()), retrieval, f)
                        }
                    })
                    .collect()
            }
            _ => task
                .claims
                .par_iter()
                .map(|claim| self.run_claim(claim, policy))
                .collect(),
        }
    }
}

fn best_mean_kb(matrix: &[GatherRow]) -> &str {
    let mut best: Option<(&str, f64)> = None;
    for (name, per_claim) in matrix {
        let total: f64 = per_claim
            .iter()
            .map(|g| g.as_ref().map_or(0.0, |g| g.evidence.max_score))
            .sum();
        let mean = total / per_claim.len().max(1) as f64;
        if best.is_none_or(|(_, m)| mean > m) {
            best = Some((name, mean));
        }
    }
    best.map(|(n, _)| n)
        .expect("at least one KB to select from")
}
