//! Shared test support: published reference tables, deterministic mocks and a
//! straight-line re-implementation of the pipeline used as an oracle.

#![allow(dead_code)]

pub mod oracle;
pub mod tables;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use kbcheck::corpus::{load_kb, load_task_named};
use kbcheck::evidence::{EvidenceScorer, ScorerError};
use kbcheck::retrieval::{FixtureRetriever, IndexedRetriever};
use kbcheck::verdict::{ClassifierError, VeracityClassifier};
use kbcheck::{ClaimTask, EvidenceSet, KbRegistry, Label, Verdict};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn pipeline_fixture() -> PathBuf {
    fixtures().join("pipeline")
}

/// FNV-1a; stable across platforms and runs.
pub fn fnv(parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            h ^= 0x1f;
            h = h.wrapping_mul(0x100000001b3);
        }
        for b in p.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

/// Pseudo-random but deterministic scores in `[0.01, 0.99]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HashScorer;

pub fn hash_score(claim: &str, sentence: &str) -> f64 {
    0.01 + 0.98 * (fnv(&[claim, sentence]) % 10_007) as f64 / 10_006.0
}

impl EvidenceScorer for HashScorer {
    fn score_batch(&self, pairs: &[(&str, &str)]) -> Result<Vec<f64>, ScorerError> {
        Ok(pairs.iter().map(|(c, s)| hash_score(c, s)).collect())
    }
}

/// NotEnoughInfo on empty evidence; otherwise a label picked by hashing the
/// claim with the top sentence.
#[derive(Debug, Clone, Copy, Default)]
pub struct HashClassifier;

pub fn hash_verdict(claim: &str, evidence: &EvidenceSet) -> Verdict {
    let Some(top) = evidence.sentences.first() else {
        return Verdict {
            label: Label::NotEnoughInfo,
            probs: [0.0, 0.0, 1.0],
        };
    };
    match fnv(&[claim, &top.text]) % 3 {
        0 => Verdict {
            label: Label::Supported,
            probs: [0.6, 0.3, 0.1],
        },
        1 => Verdict {
            label: Label::Refuted,
            probs: [0.25, 0.5, 0.25],
        },
        _ => Verdict {
            label: Label::NotEnoughInfo,
            probs: [0.1, 0.2, 0.7],
        },
    }
}

impl VeracityClassifier for HashClassifier {
    fn classify(&self, claim: &str, evidence: &EvidenceSet) -> Result<Verdict, ClassifierError> {
        Ok(hash_verdict(claim, evidence))
    }
}

pub struct PipelineFixture {
    pub tasks: Vec<ClaimTask>,
    pub registry: KbRegistry,
    pub kbs: Vec<oracle::OracleKb>,
}

/// The committed three-KB fixture: two indexed KBs and one recorded-hits KB.
pub fn load_pipeline_fixture() -> PipelineFixture {
    let dir = pipeline_fixture();
    let tasks = ["mixed", "balanced", "no_nei"]
        .iter()
        .map(|n| load_task_named(dir.join(format!("{n}.jsonl")), *n).unwrap())
        .collect();
    let mut registry = KbRegistry::new();
    let mut kbs = Vec::new();
    for name in ["encyclo", "science"] {
        let kb = load_kb(dir.join(format!("{name}.jsonl")), name).unwrap();
        kbs.push(oracle::OracleKb::indexed(name, kb.documents.clone()));
        registry.register(name, Arc::new(IndexedRetriever::new(kb).unwrap()));
    }
    let hits_path = dir.join("web_hits.jsonl");
    registry.register("web", Arc::new(FixtureRetriever::load(&hits_path).unwrap()));
    kbs.push(oracle::OracleKb::hits_from_file("web", &hits_path));
    PipelineFixture {
        tasks,
        registry,
        kbs,
    }
}
