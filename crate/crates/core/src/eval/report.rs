use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{
    bootstrap_accuracy, confusion, pearson_labeled, quality_stats, BootstrapCI, ConfusionMatrix,
    CorrelationReport, EvalError, EvidenceQualityStats,
};
use crate::corpus::{Label, RetrieverKind};
use crate::policy::{ClaimOutcome, FailureKind, KbPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FailureCounts {
    pub retriever: usize,
    pub scorer: usize,
    pub classifier: usize,
    /// Claims where some but not all union members failed.
    pub degraded: usize,
}

impl FailureCounts {
    pub fn tally(outcomes: &[ClaimOutcome]) -> Self {
        let mut out = FailureCounts::default();
        for o in outcomes {
            match o.failure.as_ref().map(|f| f.kind) {
                Some(FailureKind::RetrieverUnavailable) => out.retriever += 1,
                Some(FailureKind::ScorerUnavailable) => out.scorer += 1,
                Some(FailureKind::ClassifierUnavailable) => out.classifier += 1,
                None => {}
            }
            if !o.degraded_kbs.is_empty() {
                out.degraded += 1;
            }
        }
        out
    }

    pub fn add(&mut self, other: &FailureCounts) {
        self.retriever += other.retriever;
        self.scorer += other.scorer;
        self.classifier += other.classifier;
        self.degraded += other.degraded;
    }
}

/// Summary of one task under one policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub task: String,
    pub policy: KbPolicy,
    /// Retriever kind of the KB, for single-KB policies.
    pub kb_kind: Option<RetrieverKind>,
    /// KB picked once for the whole task by task-level selection.
    pub chosen_kb: Option<String>,
    pub n_claims: usize,
    /// Claims with a gold label.
    pub n_evaluated: usize,
    pub accuracy: Option<f64>,
    pub confusion: Option<ConfusionMatrix>,
    pub bootstrap: Option<BootstrapCI>,
    pub quality: Option<EvidenceQualityStats>,
    pub failures: FailureCounts,
}

/// Builds the result for one cell. Accuracy, confusion and bootstrap are
/// `None` when no claim carries a gold label.
pub fn summarize(
    task: &str,
    policy: &KbPolicy,
    kb_kind: Option<RetrieverKind>,
    outcomes: &[ClaimOutcome],
    golds: &[Option<Label>],
    n_resamples: usize,
    seed: u64,
) -> Result<ExperimentResult, EvalError> {
    if outcomes.len() != golds.len() {
        return Err(EvalError::LengthMismatch {
            left: outcomes.len(),
            right: golds.len(),
        });
    }
    let flags: Vec<bool> = outcomes
        .iter()
        .zip(golds)
        .filter_map(|(o, g)| g.map(|g| o.verdict.label == g))
        .collect();
    let (matrix, bootstrap) = if flags.is_empty() {
        (None, None)
    } else {
        (
            Some(confusion(outcomes, golds)?),
            Some(bootstrap_accuracy(&flags, n_resamples, seed)?),
        )
    };
    let chosen_kb = match policy {
        KbPolicy::BestEvidenceTask(_) => outcomes.first().and_then(|o| o.chosen_kb.clone()),
        _ => None,
    };
    Ok(ExperimentResult {
        task: task.to_string(),
        policy: policy.clone(),
        kb_kind,
        chosen_kb,
        n_claims: outcomes.len(),
        n_evaluated: flags.len(),
        accuracy: matrix.as_ref().map(ConfusionMatrix::accuracy),
        confusion: matrix,
        bootstrap,
        quality: if outcomes.is_empty() {
            None
        } else {
            Some(quality_stats(outcomes)?)
        },
        failures: FailureCounts::tally(outcomes),
    })
}

/// One point of the evidence-quality versus accuracy scatter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub task: String,
    pub kb: String,
    /// Empty for KBs whose retrieval scores are rank-derived rather than BM25.
    pub mean_max_bm25: Option<f64>,
    pub mean_max_e: f64,
    pub accuracy: f64,
}

fn scatter_rows(results: &[ExperimentResult]) -> Vec<ScatterRow> {
    results
        .iter()
        .filter_map(|r| {
            let KbPolicy::Single(kb) = &r.policy else {
                return None;
            };
            let quality = r.quality?;
            Some(ScatterRow {
                task: r.task.clone(),
                kb: kb.clone(),
                mean_max_bm25: (r.kb_kind == Some(RetrieverKind::Indexed))
                    .then_some(quality.mean_max_bm25),
                mean_max_e: quality.mean_max_e,
                accuracy: r.accuracy?,
            })
        })
        .collect()
}

/// Correlations of accuracy with mean max BM25 (BM25 KBs only) and with mean
/// max evidence score (all KBs).
pub fn scatter_correlations(
    rows: &[ScatterRow],
) -> (
    Result<CorrelationReport, EvalError>,
    Result<CorrelationReport, EvalError>,
) {
    let label = |r: &ScatterRow| format!("{}/{}", r.task, r.kb);
    let bm25 = rows
        .iter()
        .filter_map(|r| r.mean_max_bm25.map(|x| (x, r.accuracy, label(r))))
        .collect();
    let e = rows
        .iter()
        .map(|r| (r.mean_max_e, r.accuracy, label(r)))
        .collect();
    (pearson_labeled(bm25), pearson_labeled(e))
}

pub fn load_scatter(path: impl AsRef<Path>) -> Result<Vec<ScatterRow>, EvalError> {
    let path = path.as_ref();
    let malformed = |message: String| EvalError::Malformed {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| malformed(e.to_string()))?;
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        rows.push(record.map_err(|e: csv::Error| malformed(e.to_string()))?);
    }
    Ok(rows)
}

/// File-system safe name for a task/policy cell.
pub fn cell_slug(task: &str, policy: &KbPolicy) -> String {
    let raw = format!("{task}__{}", policy.label());
    raw.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "._+-".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn first_seen<T: PartialEq + Clone>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out = Vec::new();
    for item in items {
        if !out.contains(&item) {
            out.push(item);
        }
    }
    out
}

fn write(path: &Path, contents: &[u8]) -> Result<(), EvalError> {
    fs::write(path, contents).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_bytes(config_hash: &str, rows: Vec<Vec<String>>) -> Vec<u8> {
    let mut out = format!("# config_hash={config_hash}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        for row in rows {
            w.write_record(&row).expect("writing to memory");
        }
        w.flush().expect("writing to memory");
    }
    out
}

fn correlation_json(report: &Result<CorrelationReport, EvalError>) -> Value {
    match report {
        Ok(c) => json!({
            "r": c.r,
            "p": c.p_value,
            "n": c.n,
            "r_squared": c.r_squared(),
            "points": c.points.iter().map(|(x, y, l)| json!({"label": l, "x": x, "y": y})).collect::<Vec<_>>(),
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

/// Writes the report files for `results` into `dir`:
///
/// - `accuracy.csv`, `accuracy.md`: policies by tasks
/// - `confusion/<task>__<policy>.{raw,normalized}.csv`
/// - `scatter.csv`: single-KB cells only
/// - `correlation.json`
///
/// Each file starts with the config hash. Output depends only on the inputs.
pub fn emit_report(
    results: &[ExperimentResult],
    dir: impl AsRef<Path>,
    config_hash: &str,
) -> Result<Vec<PathBuf>, EvalError> {
    if results.is_empty() {
        return Err(EvalError::EmptyEvaluation);
    }
    let dir = dir.as_ref();
    let confusion_dir = dir.join("confusion");
    fs::create_dir_all(&confusion_dir).map_err(|source| EvalError::Io {
        path: confusion_dir.clone(),
        source,
    })?;
    let mut written = Vec::new();

    let tasks = first_seen(results.iter().map(|r| r.task.clone()));
    let policies = first_seen(results.iter().map(|r| r.policy.clone()));
    let cell = |task: &str, policy: &KbPolicy| {
        results
            .iter()
            .find(|r| r.task == task && &r.policy == policy)
            .and_then(|r| r.accuracy)
    };

    let mut rows = vec![std::iter::once("policy".to_string())
        .chain(tasks.iter().cloned())
        .collect::<Vec<_>>()];
    for p in &policies {
        let mut row = vec![p.label()];
        row.extend(
            tasks
                .iter()
                .map(|t| cell(t, p).map_or(String::new(), |a| a.to_string())),
        );
        rows.push(row);
    }
    let path = dir.join("accuracy.csv");
    write(&path, &csv_bytes(config_hash, rows))?;
    written.push(path);

    let mut md = format!("<!-- config_hash={config_hash} -->\n\n| policy |");
    for t in &tasks {
        md.push_str(&format!(" {t} |"));
    }
    md.push_str("\n|---|");
    md.push_str(&"---:|".repeat(tasks.len()));
    md.push('\n');
    for p in &policies {
        md.push_str(&format!("| {} |", p.label()));
        for t in &tasks {
            match cell(t, p) {
                Some(a) => md.push_str(&format!(" {a:.1} |")),
                None => md.push_str(" - |"),
            }
        }
        md.push('\n');
    }
    let path = dir.join("accuracy.md");
    write(&path, md.as_bytes())?;
    written.push(path);

    for r in results {
        let Some(m) = &r.confusion else { continue };
        let slug = cell_slug(&r.task, &r.policy);
        let header = || {
            std::iter::once("gold".to_string())
                .chain(Label::ALL.iter().map(|l| l.as_str().to_string()))
                .collect::<Vec<_>>()
        };
        let mut raw = vec![header()];
        let mut norm = vec![header()];
        for (i, label) in Label::ALL.iter().enumerate() {
            let mut a = vec![label.as_str().to_string()];
            a.extend(m.counts[i].iter().map(u64::to_string));
            raw.push(a);
            let mut b = vec![label.as_str().to_string()];
            b.extend(m.normalized[i].iter().map(f64::to_string));
            norm.push(b);
        }
        for (suffix, rows) in [("raw", raw), ("normalized", norm)] {
            let path = confusion_dir.join(format!("{slug}.{suffix}.csv"));
            write(&path, &csv_bytes(config_hash, rows))?;
            written.push(path);
        }
    }

    let scatter = scatter_rows(results);
    let mut rows = vec![["task", "kb", "mean_max_bm25", "mean_max_e", "accuracy"]
        .map(String::from)
        .to_vec()];
    for s in &scatter {
        rows.push(vec![
            s.task.clone(),
            s.kb.clone(),
            s.mean_max_bm25.map_or(String::new(), |x| x.to_string()),
            s.mean_max_e.to_string(),
            s.accuracy.to_string(),
        ]);
    }
    let path = dir.join("scatter.csv");
    write(&path, &csv_bytes(config_hash, rows))?;
    written.push(path);

    let (bm25, e) = scatter_correlations(&scatter);
    let doc = json!({
        "config_hash": config_hash,
        "max_bm25": correlation_json(&bm25),
        "max_e": correlation_json(&e),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("json values serialize");
    text.push('\n');
    let path = dir.join("correlation.json");
    write(&path, text.as_bytes())?;
    written.push(path);

    Ok(written)
}
