//! Dataset synthesis and evaluation commands.

mod annotation;
mod commands;
mod config;
mod generate;
mod record;

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::lexicon::LexiconError;
use crate::metrics::MetricsError;
use crate::quality_gate::GateError;
use crate::table_store::{load_tables, StoreError, TableFormat, TableStore, STORE_MAGIC};
use crate::template_engine::TemplateError;

pub use annotation::{annotation_sheet, import_annotations, write_sheet, AnnotationSummary, SHEET_HEADERS};
pub use commands::{
    evaluate, gate_records, ingest, postprocess_predictions, stats, suggest, EvaluateOptions,
    PostprocessOutcome, PredictionLine, TranslatorSpec,
};
pub use config::{in_workspace, workspace_dir, GenerateConfig, SplitRatios, DEFAULT_SHARD_SIZE, WORKSPACE_ENV};
pub use generate::{generate, reexecutes, split_of, store_hash, GenerateOutcome, Manifest, ShardInfo, Split, MANIFEST_FILE};
pub use record::{DatasetRecord, GateMetadata};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error("annotation sheet row {row}: {message}")]
    Annotation { row: usize, message: String },
    #[error("not enough records to stratify: {0}")]
    InsufficientClassCoverage(String),
    #[error("inputs differ from the manifest: {0}")]
    ManifestMismatch(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl PipelineError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        PipelineError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 1 for inputs that fail validation, 2 for unreadable or inconsistent
    /// data.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_)
            | PipelineError::Template(_)
            | PipelineError::Lexicon(_)
            | PipelineError::Gate(_)
            | PipelineError::Annotation { .. }
            | PipelineError::InsufficientClassCoverage(_)
            | PipelineError::ManifestMismatch(_) => 1,
            PipelineError::Store(_)
            | PipelineError::Metrics(_)
            | PipelineError::Format { .. }
            | PipelineError::Io { .. } => 2,
        }
    }
}

/// Open a persisted store, or load raw tables from a file or directory.
pub fn load_store(path: &Path, format: &str, language: &str) -> Result<TableStore, PipelineError> {
    if path.is_file() && is_persisted_store(path)? {
        return Ok(TableStore::open(path)?);
    }
    if !path.exists() {
        return Err(PipelineError::io(
            path,
            io::Error::from(io::ErrorKind::NotFound),
        ));
    }
    let format: TableFormat = format.parse().map_err(PipelineError::Config)?;
    Ok(TableStore::new(load_tables(path, format, language)?))
}

fn is_persisted_store(path: &Path) -> Result<bool, PipelineError> {
    let mut first = String::new();
    BufReader::new(File::open(path).map_err(|e| PipelineError::io(path, e))?)
        .read_line(&mut first)
        .map_err(|e| PipelineError::io(path, e))?;
    Ok(first.starts_with(STORE_MAGIC))
}

pub fn write_jsonl<T: serde::Serialize>(path: &Path, items: &[T]) -> Result<(), PipelineError> {
    let file = File::create(path).map_err(|e| PipelineError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for item in items {
        let line = serde_json::to_string(item).expect("records serialize");
        writeln!(out, "{line}").map_err(|e| PipelineError::io(path, e))?;
    }
    out.flush().map_err(|e| PipelineError::io(path, e))
}

pub fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| PipelineError::Format {
                path: path.to_path_buf(),
                message: format!("line {}: {e}", i + 1),
            })
        })
        .collect()
}

/// Records from a JSONL file, or from every shard listed in a dataset
/// directory's manifest (optionally only those of `split`).
pub fn read_dataset(path: &Path, split: Option<Split>) -> Result<Vec<DatasetRecord>, PipelineError> {
    if !path.is_dir() {
        return read_jsonl(path);
    }
    let manifest = Manifest::load(&path.join(MANIFEST_FILE))?;
    let mut out = Vec::new();
    for shard in manifest.shards.iter().filter(|s| split.is_none_or(|sp| s.split == sp)) {
        out.extend(read_jsonl::<DatasetRecord>(&path.join(&shard.file))?);
    }
    Ok(out)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), PipelineError> {
    fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}

pub fn create_dir(path: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(path).map_err(|e| PipelineError::io(path, e))
}
