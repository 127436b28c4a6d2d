use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::RetrieverKind;
use crate::policy::KbPolicy;
use crate::remote::RemoteConfig;
use crate::retrieval::WebSearchConfig;
use crate::verdict::HeuristicClassifier;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KbSpec {
    pub name: String,
    pub kind: RetrieverKind,
    /// Document file, for indexed KBs.
    #[serde(default)]
    pub path: Option<PathBuf>,
    /// Prebuilt index snapshot; built from `path` when absent.
    #[serde(default)]
    pub index: Option<PathBuf>,
    /// Recorded hits, for fixture KBs.
    #[serde(default)]
    pub fixture_path: Option<PathBuf>,
    #[serde(default)]
    pub web: Option<WebSearchConfig>,
    /// Documents per claim; defaults to 5 for indexed KBs, 10 otherwise.
    #[serde(default)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerSpec {
    #[default]
    Native,
    Remote(RemoteConfig),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierSpec {
    /// The heuristic classifier with default settings.
    #[default]
    Native,
    Heuristic(HeuristicClassifier),
    Remote(RemoteConfig),
}

fn default_workers() -> usize {
    4
}

fn default_seed() -> u64 {
    42
}

fn default_resamples() -> usize {
    crate::eval::DEFAULT_RESAMPLES
}

fn default_evidence_count() -> usize {
    crate::evidence::DEFAULT_EVIDENCE_COUNT
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

/// A task-by-policy experiment matrix. Relative paths are resolved against
/// the directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub tasks: Vec<TaskSpec>,
    pub kbs: Vec<KbSpec>,
    pub policies: Vec<KbPolicy>,
    #[serde(default)]
    pub scorer: ScorerSpec,
    #[serde(default)]
    pub classifier: ClassifierSpec,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_resamples")]
    pub bootstrap_resamples: usize,
    #[serde(default = "default_evidence_count")]
    pub evidence_count: usize,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Makes every relative path absolute against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for t in &mut self.tasks {
            fix(&mut t.path);
        }
        for kb in &mut self.kbs {
            for p in [&mut kb.path, &mut kb.index, &mut kb.fixture_path]
                .into_iter()
                .flatten()
            {
                fix(p);
            }
        }
        fix(&mut self.output_dir);
    }

    /// Every structural problem, not just the first. File contents are
    /// checked later, when loading.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.tasks.is_empty() {
            out.push("no tasks configured".to_string());
        }
        if self.policies.is_empty() {
            out.push("no policies configured".to_string());
        }
        if self.workers == 0 {
            out.push("workers must be at least 1".to_string());
        }
        if self.bootstrap_resamples == 0 {
            out.push("bootstrap_resamples must be at least 1".to_string());
        }
        if self.evidence_count == 0 {
            out.push("evidence_count must be at least 1".to_string());
        }
        let mut names = HashSet::new();
        for t in &self.tasks {
            if t.name.trim().is_empty() {
                out.push("task with an empty name".to_string());
            }
            if !names.insert(t.name.as_str()) {
                out.push(format!("task {:?} listed twice", t.name));
            }
        }
        let mut names = HashSet::new();
        for kb in &self.kbs {
            if !names.insert(kb.name.as_str()) {
                out.push(format!("KB {:?} listed twice", kb.name));
            }
            if kb.k == Some(0) {
                out.push(format!("KB {:?}: k must be at least 1", kb.name));
            }
            let missing = match kb.kind {
                RetrieverKind::Indexed if kb.path.is_none() => Some("path"),
                RetrieverKind::Fixture if kb.fixture_path.is_none() => Some("fixture_path"),
                RetrieverKind::WebSearch if kb.web.is_none() => Some("web"),
                _ => None,
            };
            if let Some(field) = missing {
                out.push(format!(
                    "KB {:?}: kind {:?} needs {field}",
                    kb.name, kb.kind
                ));
            }
        }
        let known: Vec<&str> = self.kbs.iter().map(|k| k.name.as_str()).collect();
        let mut seen = HashSet::new();
        for p in &self.policies {
            out.extend(p.problems_among(&known));
            if !seen.insert(p) {
                out.push(format!("policy {} listed twice", p.label()));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::from_json(
            r#"{
                "tasks": [{"name": "t", "path": "t.jsonl"}],
                "kbs": [{"name": "a", "kind": "indexed", "path": "a.jsonl"}],
                "policies": [{"single": "a"}, "no_kb", {"union": ["a"]}]
            }"#,
        )
        .unwrap();
        assert_eq!(c.seed, 42);
        assert_eq!(c.bootstrap_resamples, 200);
        assert_eq!(c.scorer, ScorerSpec::Native);
        assert_eq!(c.policies[1], KbPolicy::NoKb);
        assert!(c.problems().is_empty());
    }

    #[test]
    fn remote_stages_parse() {
        let c = ExperimentConfig::from_json(
            r#"{
                "tasks": [], "kbs": [], "policies": [],
                "scorer": {"remote": {"endpoint": "http://localhost:8000", "max_in_flight": 8}},
                "classifier": {"heuristic": {"threshold": 0.7}}
            }"#,
        )
        .unwrap();
        let ScorerSpec::Remote(r) = &c.scorer else {
            panic!()
        };
        assert_eq!(r.max_in_flight, Some(8));
        let ClassifierSpec::Heuristic(h) = &c.classifier else {
            panic!()
        };
        assert_eq!(h.threshold, 0.7);
        assert_eq!(h.negations.len(), 6);
    }

    #[test]
    fn lists_every_problem() {
        let c = ExperimentConfig::from_json(
            r#"{
                "tasks": [{"name": "t", "path": "t"}, {"name": "t", "path": "u"}],
                "kbs": [{"name": "a", "kind": "fixture"}],
                "policies": [{"single": "ghost"}, {"union": ["a", "a"]}],
                "workers": 0
            }"#,
        )
        .unwrap();
        let p = c.problems().join("\n");
        for needle in [
            "\"t\" listed twice",
            "fixture_path",
            "\"ghost\"",
            "\"a\" listed twice",
            "workers",
        ] {
            assert!(p.contains(needle), "{needle} missing from:\n{p}");
        }
    }
}
