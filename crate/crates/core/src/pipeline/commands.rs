use std::path::Path;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DatasetRecord, PipelineError};
use crate::analytics::{dataset_stats, StatsReport};
use crate::executor::AnswerTable;
use crate::lexicon::KeywordLexicon;
use crate::linearizer::{Linearizer, MalformedPrediction};
use crate::metrics::{evaluate_records, read_linearized, MetricReport, PredictionOptions};
use crate::postprocessor::{residue_audit, HttpTranslator, PostprocessReport, Postprocessor, SubprocessTranslator, Translator};
use crate::quality_gate::{gate_similarity, suggest_threshold, GateReport, ScoreFile, ThresholdError, ThresholdSuggestion};
use crate::table_store::{load_tables, StoreError, TableFormat, TableStore};

/// Where value translation is delegated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TranslatorSpec {
    /// A command speaking the one-line-in, one-line-out protocol.
    Command(String),
    /// An endpoint taking one `text/plain` POST per string.
    Url(String),
}

impl TranslatorSpec {
    pub fn build(&self) -> Result<Box<dyn Translator>, PipelineError> {
        match self {
            TranslatorSpec::Command(cmd) => SubprocessTranslator::from_command_line(cmd)
                .map(|t| Box::new(t) as Box<dyn Translator>)
                .ok_or_else(|| PipelineError::Config("empty translator command".into())),
            TranslatorSpec::Url(url) => Ok(Box::new(HttpTranslator::new(url.clone()))),
        }
    }
}

#[derive(Default)]
pub struct EvaluateOptions {
    /// Lexicon the predictions were produced in. When set, predictions are
    /// decoded with it and post-processed into the gold lexicon.
    pub postprocess_from: Option<KeywordLexicon>,
    pub translator: Option<TranslatorSpec>,
}

/// Score a prediction file against a gold file.
pub fn evaluate(
    pred_path: &Path,
    gold_path: &Path,
    lex: &KeywordLexicon,
    options: &EvaluateOptions,
) -> Result<(MetricReport, Option<PostprocessReport>), PipelineError> {
    let pred = read_linearized(pred_path)?;
    let gold = read_linearized(gold_path)?;
    let Some(from) = &options.postprocess_from else {
        return Ok((evaluate_records(&pred, &gold, lex, PredictionOptions::default())?, None));
    };
    let translator = options.translator.as_ref().map(|t| t.build()).transpose()?;
    let mut pp = Postprocessor::new(from, lex);
    if let Some(t) = &translator {
        pp = pp.with_translator(t.as_ref());
    }
    let total = Mutex::new(PostprocessReport::default());
    let transform = |t: AnswerTable| {
        let (out, r) = pp.run(&t);
        total.lock().unwrap().merge(&r);
        out
    };
    let report = evaluate_records(
        &pred,
        &gold,
        lex,
        PredictionOptions {
            lexicon: Some(from),
            transform: Some(&transform),
        },
    )?;
    Ok((report, Some(total.into_inner().unwrap())))
}

pub fn stats(records: &[DatasetRecord], store: Option<&TableStore>) -> StatsReport {
    dataset_stats(records, store)
}

/// Drop records that failed execution, then those scoring under
/// `threshold`. Retained records carry their score.
pub fn gate_records(
    records: Vec<DatasetRecord>,
    scores: &ScoreFile,
    threshold: f64,
) -> Result<(Vec<DatasetRecord>, GateReport), PipelineError> {
    let total_in = records.len();
    let (ok, failed): (Vec<_>, Vec<_>) = records.into_iter().partition(|r| r.gate_metadata.exec_ok);
    let exec = GateReport {
        total_in,
        discarded_exec_error: failed.len(),
        retained: ok.len(),
        ..Default::default()
    };
    let (mut kept, sim) = gate_similarity(ok, scores, threshold, |r| r.id.as_str())?;
    for r in &mut kept {
        r.gate_metadata.similarity = scores.get(&r.id);
        r.gate_metadata.retained = true;
    }
    Ok((kept, exec.then(&sim)))
}

pub fn suggest(scores: &ScoreFile, bins: usize) -> Result<ThresholdSuggestion, ThresholdError> {
    suggest_threshold(&scores.values(), bins)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionLine {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PostprocessOutcome {
    #[serde(skip)]
    pub lines: Vec<PredictionLine>,
    pub report: PostprocessReport,
    /// Predictions that did not decode; copied unchanged.
    pub malformed: usize,
    /// Strings still holding a source-language digit or keyword.
    pub residue: usize,
}

/// Post-process a file of linearized predictions from `from` into `to`.
pub fn postprocess_predictions(
    path: &Path,
    from: &KeywordLexicon,
    to: &KeywordLexicon,
    translator: Option<&dyn Translator>,
) -> Result<PostprocessOutcome, PipelineError> {
    let preds = read_linearized(path)?;
    let mut pp = Postprocessor::new(from, to);
    if let Some(t) = translator {
        pp = pp.with_translator(t);
    }
    let decode_from = Linearizer::new(from);
    let decode_to = Linearizer::new(to);
    let encode = Linearizer::new(to);
    let results: Vec<(PredictionLine, Option<(PostprocessReport, usize)>)> = preds
        .par_iter()
        .map(|p| {
            let decoded: Result<AnswerTable, MalformedPrediction> =
                decode_from.decode(&p.text).or_else(|_| decode_to.decode(&p.text));
            match decoded {
                Ok(t) => {
                    let (out, report) = pp.run(&t);
                    let residue = residue_audit(&out, from);
                    let line = PredictionLine {
                        id: p.id.clone(),
                        text: encode.encode_answer(&out),
                    };
                    (line, Some((report, residue)))
                }
                Err(_) => (
                    PredictionLine {
                        id: p.id.clone(),
                        text: p.text.clone(),
                    },
                    None,
                ),
            }
        })
        .collect();
    let mut outcome = PostprocessOutcome {
        lines: Vec::with_capacity(results.len()),
        report: PostprocessReport::default(),
        malformed: 0,
        residue: 0,
    };
    for (line, stats) in results {
        match stats {
            Some((r, residue)) => {
                outcome.report.merge(&r);
                outcome.residue += residue;
            }
            None => outcome.malformed += 1,
        }
        outcome.lines.push(line);
    }
    Ok(outcome)
}

/// Load raw tables and persist them as a store.
pub fn ingest(input: &Path, format: TableFormat, language: &str, output: &Path) -> Result<TableStore, StoreError> {
    let store = TableStore::new(load_tables(input, format, language)?);
    store.persist(output)?;
    Ok(store)
}
