//! Runs a task-by-policy matrix from a config file.
//!
//! Layout of an output directory:
//!
//! ```text
//! manifest.json
//! cells/<task>__<policy>/outcomes.jsonl   header line, then one record per claim
//! cells/<task>__<policy>/result.json
//! cells/<task>__<policy>/DONE             holds the config hash
//! report/...                              see eval::emit_report
//! ```
//!
//! Reports are always rendered from the stored outcomes, so a resumed run and
//! a fresh run with the same config write identical report files.

mod config;

pub use config::{ClassifierSpec, ExperimentConfig, KbSpec, ScorerSpec, TaskSpec};

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{load_kb, load_task_named, ClaimTask, Label, RetrieverKind};
use crate::eval::{cell_slug, emit_report, summarize, EvalError, ExperimentResult, FailureCounts};
use crate::evidence::{EvidenceScorer, LexicalScorer, RemoteScorer};
use crate::policy::{ClaimOutcome, KbPolicy, KbRegistry, Pipeline};
use crate::retrieval::{
    load_snapshot, FixtureRetriever, IndexedRetriever, Retriever, WebSearchRetriever,
};
use crate::verdict::{HeuristicClassifier, RemoteClassifier, VeracityClassifier};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CELLS_DIR: &str = "cells";
pub const REPORT_DIR: &str = "report";
pub const OUTCOMES_FILE: &str = "outcomes.jsonl";
pub const RESULT_FILE: &str = "result.json";
pub const DONE_FILE: &str = "DONE";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Malformed { path: PathBuf, message: String },
    #[error("{0}: no manifest; not a run directory")]
    NoManifest(PathBuf),
    #[error("cell {0} is incomplete")]
    IncompleteCell(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("worker pool: {0}")]
    Pool(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Written once per run, after every cell has finished.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub tool_version: String,
    pub seed: u64,
    pub bootstrap_resamples: usize,
    pub started_at: String,
    pub finished_at: String,
    /// Cell directory names in config order.
    pub cells: Vec<String>,
    pub computed: Vec<String>,
    pub skipped: Vec<String>,
    pub failures: FailureCounts,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub resume: bool,
    /// Overrides the config's `output_dir`.
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub computed: Vec<String>,
    pub skipped: Vec<String>,
    pub failures: FailureCounts,
}

/// Hex SHA-256 of the raw config bytes.
pub fn config_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Header line of an outcomes file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CellHeader {
    config_hash: String,
    task: String,
    policy: KbPolicy,
    kb_kind: Option<RetrieverKind>,
    seed: u64,
    bootstrap_resamples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct OutcomeRecord {
    gold: Option<Label>,
    outcome: ClaimOutcome,
}

struct Loaded {
    tasks: Vec<ClaimTask>,
    registry: KbRegistry,
    scorer: Box<dyn EvidenceScorer>,
    classifier: Box<dyn VeracityClassifier>,
}

fn load(config: &ExperimentConfig) -> Result<Loaded, ExperimentError> {
    let mut problems = config.problems();
    let mut tasks = Vec::new();
    for spec in &config.tasks {
        match load_task_named(&spec.path, &spec.name) {
            Ok(t) => tasks.push(t),
            Err(e) => problems.push(format!("task {:?}: {e}", spec.name)),
        }
    }
    let mut registry = KbRegistry::new();
    for spec in &config.kbs {
        match build_retriever(spec) {
            Ok(r) => {
                let k = spec.k.unwrap_or_else(|| r.kind().default_k());
                registry.register_with_k(&spec.name, r, k);
            }
            Err(e) => problems.push(format!("KB {:?}: {e}", spec.name)),
        }
    }
    if !problems.is_empty() {
        return Err(ExperimentError::Config(problems));
    }
    let scorer: Box<dyn EvidenceScorer> = match &config.scorer {
        ScorerSpec::Native => Box::new(LexicalScorer),
        ScorerSpec::Remote(r) => Box::new(RemoteScorer::new(r.clone())),
    };
    let classifier: Box<dyn VeracityClassifier> = match &config.classifier {
        ClassifierSpec::Native => Box::new(HeuristicClassifier::default()),
        ClassifierSpec::Heuristic(h) => Box::new(h.clone()),
        ClassifierSpec::Remote(r) => Box::new(RemoteClassifier::new(r.clone())),
    };
    Ok(Loaded {
        tasks,
        registry,
        scorer,
        classifier,
    })
}

fn build_retriever(spec: &KbSpec) -> Result<Arc<dyn Retriever>, String> {
    match spec.kind {
        RetrieverKind::Indexed => {
            let path = spec.path.as_ref().ok_or("missing path")?;
            let kb = load_kb(path, &spec.name).map_err(|e| e.to_string())?;
            let r = match &spec.index {
                Some(index) => {
                    let index = load_snapshot(index).map_err(|e| e.to_string())?;
                    IndexedRetriever::with_index(kb, index)
                }
                None => IndexedRetriever::new(kb),
            };
            Ok(Arc::new(r.map_err(|e| e.to_string())?))
        }
        RetrieverKind::Fixture => {
            let path = spec.fixture_path.as_ref().ok_or("missing fixture_path")?;
            Ok(Arc::new(
                FixtureRetriever::load(path).map_err(|e| e.to_string())?,
            ))
        }
        RetrieverKind::WebSearch => {
            let web = spec.web.clone().ok_or("missing web")?;
            Ok(Arc::new(WebSearchRetriever::new(web)))
        }
    }
}

/// Reads, validates and loads a config file. Every problem found is reported
/// in one [`ExperimentError::Config`].
pub fn read_config(path: impl AsRef<Path>) -> Result<(ExperimentConfig, String), ExperimentError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(io_err(path))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| ExperimentError::Malformed {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut config = ExperimentConfig::from_json(&text)
        .map_err(|e| ExperimentError::Config(vec![format!("{}: {e}", path.display())]))?;
    let base = path.parent().unwrap_or(Path::new("."));
    config.resolve_paths(base);
    Ok((config, config_hash(&bytes)))
}

fn cell_done(dir: &Path, hash: &str) -> bool {
    fs::read_to_string(dir.join(DONE_FILE)).is_ok_and(|s| s.trim() == hash)
}

fn write_cell(
    dir: &Path,
    header: &CellHeader,
    records: &[OutcomeRecord],
    result: &ExperimentResult,
) -> Result<(), ExperimentError> {
    if dir.exists() {
        fs::remove_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(OUTCOMES_FILE);
    let mut out = Vec::new();
    serde_json::to_writer(&mut out, header).expect("header serializes");
    out.push(b'\n');
    for r in records {
        serde_json::to_writer(&mut out, r).expect("outcome serializes");
        out.push(b'\n');
    }
    fs::write(&path, out).map_err(io_err(&path))?;
    let path = dir.join(RESULT_FILE);
    let doc = serde_json::json!({ "config_hash": header.config_hash, "result": result });
    let text = serde_json::to_string_pretty(&doc).expect("result serializes") + "\n";
    fs::write(&path, text).map_err(io_err(&path))?;
    let path = dir.join(DONE_FILE);
    fs::write(&path, format!("{}\n", header.config_hash)).map_err(io_err(&path))
}

fn read_cell(dir: &Path) -> Result<(CellHeader, Vec<OutcomeRecord>), ExperimentError> {
    let path = dir.join(OUTCOMES_FILE);
    let file = fs::File::open(&path).map_err(io_err(&path))?;
    let malformed = |line: usize, e: serde_json::Error| ExperimentError::Malformed {
        path: path.clone(),
        message: format!("line {line}: {e}"),
    };
    let mut lines = BufReader::new(file).lines();
    let first = lines
        .next()
        .ok_or_else(|| ExperimentError::Malformed {
            path: path.clone(),
            message: "empty outcomes file".into(),
        })?
        .map_err(io_err(&path))?;
    let header: CellHeader = serde_json::from_str(&first).map_err(|e| malformed(1, e))?;
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(io_err(&path))?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line).map_err(|e| malformed(i + 2, e))?);
    }
    Ok((header, records))
}

fn result_from_cell(
    header: &CellHeader,
    records: &[OutcomeRecord],
) -> Result<ExperimentResult, EvalError> {
    let outcomes: Vec<ClaimOutcome> = records.iter().map(|r| r.outcome.clone()).collect();
    let golds: Vec<Option<Label>> = records.iter().map(|r| r.gold).collect();
    summarize(
        &header.task,
        &header.policy,
        header.kb_kind,
        &outcomes,
        &golds,
        header.bootstrap_resamples,
        header.seed,
    )
}

/// Runs every (task, policy) cell of the config and renders the reports.
///
/// With `resume`, cells whose `DONE` sentinel carries the current config hash
/// are not recomputed.
pub fn run_experiment(
    config_path: impl AsRef<Path>,
    options: &RunOptions,
) -> Result<RunSummary, ExperimentError> {
    let started_at = chrono::Utc::now().to_rfc3339();
    let (config, hash) = read_config(config_path)?;
    let loaded = load(&config)?;
    let out_dir = options
        .output_dir
        .clone()
        .unwrap_or(config.output_dir.clone());
    let cells_dir = out_dir.join(CELLS_DIR);
    fs::create_dir_all(&cells_dir).map_err(io_err(&cells_dir))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let mut pipeline = Pipeline::new(
        &loaded.registry,
        loaded.scorer.as_ref(),
        loaded.classifier.as_ref(),
    );
    pipeline.evidence_count = config.evidence_count;

    let mut cells = Vec::new();
    let mut computed = Vec::new();
    let mut skipped = Vec::new();
    let mut failures = FailureCounts::default();
    for task in &loaded.tasks {
        for policy in &config.policies {
            let slug = cell_slug(&task.name, policy);
            let dir = cells_dir.join(&slug);
            cells.push(slug.clone());
            if options.resume && cell_done(&dir, &hash) {
                log::info!("cell {slug}: complete, skipping");
                let (header, records) = read_cell(&dir)?;
                failures.add(&result_from_cell(&header, &records)?.failures);
                skipped.push(slug);
                continue;
            }
            log::info!("cell {slug}: running {} claims", task.claims.len());
            let outcomes = pool.install(|| pipeline.run_task(task, policy));
            let header = CellHeader {
                config_hash: hash.clone(),
                task: task.name.clone(),
                policy: policy.clone(),
                kb_kind: match policy {
                    KbPolicy::Single(kb) => loaded.registry.kind(kb),
                    _ => None,
                },
                seed: config.seed,
                bootstrap_resamples: config.bootstrap_resamples,
            };
            let records: Vec<OutcomeRecord> = task
                .claims
                .iter()
                .zip(outcomes)
                .map(|(c, o)| OutcomeRecord {
                    gold: c.gold,
                    outcome: o,
                })
                .collect();
            let result = result_from_cell(&header, &records)?;
            if result.failures != FailureCounts::default() {
                log::warn!("cell {slug}: {:?}", result.failures);
            }
            failures.add(&result.failures);
            write_cell(&dir, &header, &records, &result)?;
            computed.push(slug);
        }
    }

    let manifest = RunManifest {
        config_hash: hash,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        bootstrap_resamples: config.bootstrap_resamples,
        started_at,
        finished_at: chrono::Utc::now().to_rfc3339(),
        cells,
        computed: computed.clone(),
        skipped: skipped.clone(),
        failures,
    };
    let path = out_dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    fs::write(&path, text).map_err(io_err(&path))?;

    render_reports(&out_dir)?;
    Ok(RunSummary {
        output_dir: out_dir,
        computed,
        skipped,
        failures,
    })
}

pub fn read_manifest(dir: impl AsRef<Path>) -> Result<RunManifest, ExperimentError> {
    let path = dir.as_ref().join(MANIFEST_FILE);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(ExperimentError::NoManifest(dir.as_ref().to_path_buf()))
        }
        Err(e) => return Err(io_err(&path)(e)),
    };
    serde_json::from_str(&text).map_err(|e| ExperimentError::Malformed {
        path,
        message: e.to_string(),
    })
}

/// Recomputes every cell's result from its stored outcomes and writes the
/// report files under `<dir>/report`.
pub fn render_reports(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, ExperimentError> {
    let dir = dir.as_ref();
    let manifest = read_manifest(dir)?;
    let mut results = Vec::new();
    for slug in &manifest.cells {
        let cell = dir.join(CELLS_DIR).join(slug);
        if !cell_done(&cell, &manifest.config_hash) {
            return Err(ExperimentError::IncompleteCell(slug.clone()));
        }
        let (header, records) = read_cell(&cell)?;
        results.push(result_from_cell(&header, &records)?);
    }
    let report = dir.join(REPORT_DIR);
    Ok(emit_report(&results, report, &manifest.config_hash)?)
}
