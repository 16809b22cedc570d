use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{create_dir, read_jsonl, DatasetRecord, GateMetadata, GenerateConfig, PipelineError, SplitRatios};
use crate::analytics::classify;
use crate::executor::{execute, execute_batch, AnswerTable};
use crate::hashing::{digest_parts, hex, sha256_hex, stable_u64};
use crate::lexicon::{monolingualize, KeywordLexicon};
use crate::linearizer::Linearizer;
use crate::quality_gate::{gate_execution, gate_similarity, GateReport, ScoreFile};
use crate::sql::{count_keywords, parse};
use crate::table_store::TableStore;
use crate::template_engine::{bundled_templates_text, generate_batch, parse_templates, Instantiation};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Split::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown split {s:?}"))
    }
}

/// Split for a key, from its hash alone: adding tables never moves
/// existing records.
pub fn split_of(key: &str, ratios: &SplitRatios) -> Split {
    let u = stable_u64(&[b"split", key.as_bytes()]) as f64 / (u64::MAX as f64 + 1.0);
    if u < ratios.train {
        Split::Train
    } else if u < ratios.train + ratios.validation {
        Split::Validation
    } else {
        Split::Test
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardInfo {
    pub split: Split,
    pub file: String,
    pub records: usize,
    pub sha256: String,
}

/// Everything needed to reproduce a generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub seed: u64,
    pub quota: usize,
    pub language: String,
    pub templates_sha256: String,
    pub lexicon_sha256: String,
    pub store_sha256: String,
    pub scores_sha256: Option<String>,
    pub questions_sha256: Option<String>,
    pub threshold: Option<f64>,
    pub drop_empty_answers: bool,
    pub splits: SplitRatios,
    pub split_by_table: bool,
    pub gate: GateReport,
    pub counts: BTreeMap<Split, usize>,
    pub shards: Vec<ShardInfo>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| PipelineError::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Fields that determine the output, as `(name, value)` pairs.
    fn inputs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("seed", self.seed.to_string()),
            ("quota", self.quota.to_string()),
            ("templates", self.templates_sha256.clone()),
            ("lexicon", self.lexicon_sha256.clone()),
            ("store", self.store_sha256.clone()),
            ("scores", format!("{:?}", self.scores_sha256)),
            ("questions", format!("{:?}", self.questions_sha256)),
            ("threshold", format!("{:?}", self.threshold)),
            ("drop_empty_answers", self.drop_empty_answers.to_string()),
            ("splits", format!("{:?}", self.splits)),
            ("split_by_table", self.split_by_table.to_string()),
        ]
    }

    pub fn check_same_inputs(&self, other: &Manifest) -> Result<(), PipelineError> {
        let diffs: Vec<&str> = self
            .inputs()
            .into_iter()
            .zip(other.inputs())
            .filter(|(a, b)| a.1 != b.1)
            .map(|(a, _)| a.0)
            .collect();
        if diffs.is_empty() {
            Ok(())
        } else {
            Err(PipelineError::ManifestMismatch(diffs.join(", ")))
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenerateOutcome {
    pub manifest: Manifest,
    pub records: BTreeMap<Split, Vec<DatasetRecord>>,
}

#[derive(Deserialize)]
struct QuestionLine {
    id: String,
    question: String,
}

fn record_id(table_id: &str, query: &str) -> String {
    hex(&digest_parts(&[table_id.as_bytes(), query.as_bytes()])[..8])
}

fn build_record(
    inst: &Instantiation,
    answer: &AnswerTable,
    lex: &KeywordLexicon,
    questions: &HashMap<String, String>,
) -> Result<DatasetRecord, PipelineError> {
    let ast = parse(&inst.query_text).expect("executed queries parse");
    let monolingual = monolingualize(&ast, lex)?;
    let id = record_id(&inst.table_id, &inst.query_text);
    Ok(DatasetRecord {
        question: questions.get(&id).cloned().unwrap_or_else(|| monolingual.clone()),
        id,
        language: lex.language().to_string(),
        query_code_mixed: inst.query_text.clone(),
        query_monolingual: monolingual,
        input_table_id: inst.table_id.clone(),
        answer: Linearizer::new(lex).encode_answer(answer),
        operator_classes: classify(&ast).into_iter().collect(),
        keyword_count: count_keywords(&inst.query_text).expect("executed queries parse"),
        gate_metadata: GateMetadata {
            exec_ok: true,
            similarity: None,
            retained: true,
        },
    })
}

fn file_hash(path: &Option<std::path::PathBuf>) -> Result<Option<String>, PipelineError> {
    path.as_ref()
        .map(|p| fs::read(p).map(|b| sha256_hex(&b)).map_err(|e| PipelineError::io(p, e)))
        .transpose()
}

/// Hash of a store's content: table ids are content hashes already.
pub fn store_hash(store: &TableStore) -> String {
    sha256_hex(store.ids().collect::<Vec<_>>().join("\n").as_bytes())
}

/// Run the whole synthesis pipeline and write shards plus a manifest to
/// `cfg.output`. With `expected`, inputs must match that manifest.
pub fn generate(cfg: &GenerateConfig, expected: Option<&Manifest>) -> Result<GenerateOutcome, PipelineError> {
    cfg.validate()?;
    let lex = KeywordLexicon::resolve(&cfg.lexicon)?;
    let template_text = match &cfg.templates {
        Some(p) => fs::read_to_string(p).map_err(|e| PipelineError::io(p, e))?,
        None => bundled_templates_text().to_string(),
    };
    let templates = parse_templates(&template_text)?;
    let language = cfg.table_language.clone().unwrap_or_else(|| lex.language().to_string());
    let store = super::load_store(&cfg.tables, &cfg.table_format, &language)?;
    let scores = cfg.scores.as_deref().map(ScoreFile::load).transpose()?;
    let questions: HashMap<String, String> = match &cfg.questions {
        Some(p) => read_jsonl::<QuestionLine>(p)?
            .into_iter()
            .filter(|q| !q.question.trim().is_empty())
            .map(|q| (q.id, q.question))
            .collect(),
        None => HashMap::new(),
    };
    let threshold = scores.as_ref().map(|_| cfg.threshold_for(lex.language()));

    let mut manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        quota: cfg.quota,
        language: lex.language().to_string(),
        templates_sha256: sha256_hex(template_text.as_bytes()),
        lexicon_sha256: lex.source_hash().to_string(),
        store_sha256: store_hash(&store),
        scores_sha256: file_hash(&cfg.scores)?,
        questions_sha256: file_hash(&cfg.questions)?,
        threshold,
        drop_empty_answers: cfg.drop_empty_answers,
        splits: cfg.splits,
        split_by_table: cfg.split_by_table,
        gate: GateReport::default(),
        counts: BTreeMap::new(),
        shards: Vec::new(),
    };
    if let Some(exp) = expected {
        exp.check_same_inputs(&manifest)?;
    }

    let batch = generate_batch(&templates, &store, cfg.quota, cfg.seed);
    let executed = execute_batch(batch, &store, &lex);
    let (kept, mut report) = gate_execution(executed, cfg.drop_empty_answers);
    let mut records = kept
        .par_iter()
        .map(|(inst, answer)| build_record(inst, answer, &lex, &questions))
        .collect::<Result<Vec<_>, _>>()?;
    if let (Some(scores), Some(t)) = (&scores, threshold) {
        let (kept, sim_report) = gate_similarity(records, scores, t, |r| r.id.as_str())?;
        records = kept;
        for r in &mut records {
            r.gate_metadata.similarity = scores.get(&r.id);
        }
        report = report.then(&sim_report);
    }
    manifest.gate = report;

    let mut by_split: BTreeMap<Split, Vec<DatasetRecord>> = Split::ALL.iter().map(|&s| (s, Vec::new())).collect();
    for r in records {
        let key = if cfg.split_by_table { &r.input_table_id } else { &r.id };
        by_split.get_mut(&split_of(key, &cfg.splits)).unwrap().push(r);
    }

    create_dir(&cfg.output)?;
    remove_stale_shards(&cfg.output)?;
    for (&split, recs) in &by_split {
        manifest.counts.insert(split, recs.len());
        for (i, chunk) in recs.chunks(cfg.shard_size).enumerate() {
            let file = format!("{split}-{i:05}.jsonl");
            let mut bytes = Vec::new();
            for r in chunk {
                serde_json::to_writer(&mut bytes, r).expect("records serialize");
                bytes.push(b'\n');
            }
            let path = cfg.output.join(&file);
            fs::write(&path, &bytes).map_err(|e| PipelineError::io(&path, e))?;
            manifest.shards.push(ShardInfo {
                split,
                file,
                records: chunk.len(),
                sha256: sha256_hex(&bytes),
            });
        }
    }
    let path = cfg.output.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(|e| PipelineError::io(&path, e))?;
    Ok(GenerateOutcome {
        manifest,
        records: by_split,
    })
}

fn remove_stale_shards(dir: &Path) -> Result<(), PipelineError> {
    let entries = fs::read_dir(dir).map_err(|e| PipelineError::io(dir, e))?;
    for entry in entries.flatten() {
        let name = entry.file_name().to_string_lossy().into_owned();
        let is_shard = name.ends_with(".jsonl")
            && Split::ALL.iter().any(|s| {
                name.strip_prefix(s.as_str())
                    .and_then(|r| r.strip_prefix('-'))
                    .is_some_and(|r| r.trim_end_matches(".jsonl").chars().all(|c| c.is_ascii_digit()))
            });
        if is_shard {
            fs::remove_file(entry.path()).map_err(|e| PipelineError::io(&entry.path(), e))?;
        }
    }
    Ok(())
}

/// Whether executing the record's query against its table reproduces the
/// stored answer text.
pub fn reexecutes(record: &DatasetRecord, store: &TableStore, lex: &KeywordLexicon) -> bool {
    let (Some(table), Ok(ast)) = (store.get(&record.input_table_id), parse(&record.query_code_mixed)) else {
        return false;
    };
    execute(&ast, table, lex).is_ok_and(|t| Linearizer::new(lex).encode_answer(&t) == record.answer)
}
