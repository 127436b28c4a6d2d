//! Claim verification with the knowledge base as a swappable input.
//!
//! The pipeline has three stages: BM25 document retrieval ([`retrieval`]),
//! evidence sentence selection ([`evidence`]) and ternary veracity prediction
//! ([`verdict`]). [`policy`] wires the stages together for a single KB, a union
//! of KBs, no KB at all, or evidence-quality driven KB selection, and [`eval`]
//! turns per-claim outcomes into accuracy, confusion matrices, bootstrap
//! intervals and correlation reports. [`experiment`] runs whole
//! task-by-policy matrices from a config file with resumable cells.

pub mod corpus;
pub mod eval;
pub mod evidence;
pub mod experiment;
pub mod policy;
pub(crate) mod remote;
pub mod retrieval;
pub mod verdict;

pub use corpus::{Claim, ClaimTask, Document, KnowledgeBase, Label, RetrieverKind};
pub use eval::{BootstrapCI, ConfusionMatrix, CorrelationReport, EvidenceQualityStats};
pub use evidence::{EvidenceScorer, EvidenceSentence, EvidenceSet, LexicalScorer};
pub use policy::{ClaimOutcome, FailureKind, KbPolicy, KbRegistry};
pub use remote::RemoteConfig;
pub use retrieval::{InvertedIndex, RetrievalResult, Retriever};
pub use verdict::{HeuristicClassifier, VeracityClassifier, Verdict};
