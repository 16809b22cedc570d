use std::collections::BTreeMap;
use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::quality_gate::DEFAULT_THRESHOLD;

/// Environment variable naming the directory relative paths resolve against.
pub const WORKSPACE_ENV: &str = "TABQA_WORKSPACE";

pub const DEFAULT_SHARD_SIZE: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            train: 0.8,
            validation: 0.1,
            test: 0.1,
        }
    }
}

/// Settings for `generate`. Loaded from TOML; every field has a default
/// except `tables`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateConfig {
    /// A persisted table store, or a file or directory of tables.
    pub tables: PathBuf,
    /// Format of raw tables; ignored for a persisted store.
    pub table_format: String,
    /// Language tag recorded on raw tables.
    pub table_language: Option<String>,
    /// Template file; the bundled set when absent.
    pub templates: Option<PathBuf>,
    /// Bundled lexicon tag or a lexicon file.
    pub lexicon: String,
    pub quota: usize,
    pub seed: u64,
    pub splits: SplitRatios,
    /// Assign whole tables to one split, so no table is shared.
    pub split_by_table: bool,
    pub drop_empty_answers: bool,
    /// Similarity scores; enables the similarity gate.
    pub scores: Option<PathBuf>,
    pub threshold: f64,
    /// Per-language overrides of `threshold`.
    pub thresholds: BTreeMap<String, f64>,
    /// JSONL of `{id, question}` replacing the default questions.
    pub questions: Option<PathBuf>,
    pub output: PathBuf,
    pub shard_size: usize,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        Self {
            tables: PathBuf::new(),
            table_format: "csv".into(),
            table_language: None,
            templates: None,
            lexicon: "bn".into(),
            quota: 10_000,
            seed: 0,
            splits: SplitRatios::default(),
            split_by_table: true,
            drop_empty_answers: false,
            scores: None,
            threshold: DEFAULT_THRESHOLD,
            thresholds: BTreeMap::new(),
            questions: None,
            output: PathBuf::from("dataset"),
            shard_size: DEFAULT_SHARD_SIZE,
        }
    }
}

impl GenerateConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if self.tables.as_os_str().is_empty() {
            return bad("`tables` is required".into());
        }
        let r = self.splits;
        if [r.train, r.validation, r.test].iter().any(|x| !(0.0..=1.0).contains(x)) {
            return bad("split ratios must lie in [0, 1]".into());
        }
        if (r.train + r.validation + r.test - 1.0).abs() > 1e-9 {
            return bad(format!(
                "split ratios sum to {}, expected 1",
                r.train + r.validation + r.test
            ));
        }
        for (lang, t) in std::iter::once((&"default".to_string(), &self.threshold)).chain(&self.thresholds) {
            if !(0.0..=1.0).contains(t) {
                return bad(format!("threshold for {lang} is {t}, outside [0, 1]"));
            }
        }
        if self.shard_size == 0 {
            return bad("`shard_size` must be positive".into());
        }
        self.table_format
            .parse::<crate::table_store::TableFormat>()
            .map_err(PipelineError::Config)?;
        Ok(())
    }

    pub fn threshold_for(&self, language: &str) -> f64 {
        self.thresholds.get(language).copied().unwrap_or(self.threshold)
    }

    /// Resolve relative paths against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() && !p.as_os_str().is_empty() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.tables);
        fix(&mut self.output);
        for p in [&mut self.templates, &mut self.scores, &mut self.questions].into_iter().flatten() {
            fix(p);
        }
        if self.lexicon.contains(['/', '\\']) || self.lexicon.ends_with(".lex") {
            let p = Path::new(&self.lexicon);
            if p.is_relative() {
                self.lexicon = base.join(p).to_string_lossy().into_owned();
            }
        }
    }
}

/// The workspace directory from the environment, or the current directory.
pub fn workspace_dir() -> PathBuf {
    env::var_os(WORKSPACE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// `path` resolved against the workspace when relative.
pub fn in_workspace(path: &Path) -> PathBuf {
    if path.is_relative() {
        workspace_dir().join(path)
    } else {
        path.to_path_buf()
    }
}
