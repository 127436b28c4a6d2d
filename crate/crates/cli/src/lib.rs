//! Subcommands behind the `kbcheck` binary.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use kbcheck::corpus::load_kb;
use kbcheck::experiment::{render_reports, run_experiment, RunOptions, RunSummary};
use kbcheck::retrieval::{build_index, save_snapshot};

#[derive(Debug, Parser)]
#[command(
    name = "kbcheck",
    version,
    about = "Claim verification across knowledge bases"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a BM25 index snapshot for a knowledge base file.
    Index {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every task and policy cell of an experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Skip cells already completed under the same config.
        #[arg(long)]
        resume: bool,
    },
    /// Re-render reports from the stored outcomes of a run directory.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
}

pub fn cmd_index(kb_path: &Path, out: &Path) -> Result<String> {
    let name = kb_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "kb".to_string());
    let kb = load_kb(kb_path, name).with_context(|| format!("loading {}", kb_path.display()))?;
    let index = build_index(&kb)?;
    save_snapshot(&index, out)?;
    Ok(format!(
        "docs={} avg_doc_length={}",
        index.doc_count(),
        index.avg_doc_length()
    ))
}

pub fn cmd_run(config: &Path, resume: bool) -> Result<RunSummary> {
    let options = RunOptions {
        resume,
        output_dir: None,
    };
    Ok(run_experiment(config, &options)?)
}

pub fn cmd_report(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        bail!("{} is not a directory", dir.display());
    }
    Ok(render_reports(dir)?)
}

/// Runs one parsed command and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Index { kb, out } => cmd_index(&kb, &out).map(|line| println!("{line}")),
        Command::Run { config, resume } => cmd_run(&config, resume).map(|s| {
            println!(
                "output={} computed={} skipped={} retriever_failures={} scorer_failures={} classifier_failures={}",
                s.output_dir.display(),
                s.computed.len(),
                s.skipped.len(),
                s.failures.retriever,
                s.failures.scorer,
                s.failures.classifier
            );
        }),
        Command::Report { dir } => cmd_report(&dir).map(|files| {
            println!("wrote {} report files", files.len());
        }),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
