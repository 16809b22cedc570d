//! Table, row, column and cell exact-match scores.
//!
//! Table EM compares whole tables as sequences. Rows, columns and cells are
//! matched as multisets and micro-averaged over a corpus. All strings are
//! whitespace-normalized first. A column is its header plus its ordered
//! values and a cell is its header plus its value, so a correct value under
//! a wrong header earns nothing.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::hash::Hash;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::{classify, OperatorClass};
use crate::executor::AnswerTable;
use crate::lexicon::KeywordLexicon;
use crate::linearizer::{Linearizer, MalformedPrediction};
use crate::table_store::normalize_ws;

pub type Prediction = Result<AnswerTable, MalformedPrediction>;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("record {index}: prediction id {pred:?} does not match gold id {gold:?}")]
    IdMismatch {
        index: usize,
        pred: String,
        gold: String,
    },
    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },
    #[error("reading {0}")]
    Io(String, #[source] std::io::Error),
}

/// Matched, predicted and gold item counts for one granularity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchCounts {
    pub matched: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl MatchCounts {
    fn add(&mut self, o: MatchCounts) {
        self.matched += o.matched;
        self.predicted += o.predicted;
        self.gold += o.gold;
    }

    pub fn scores(&self) -> Scores {
        if self.predicted == 0 && self.gold == 0 {
            return Scores {
                precision: 100.0,
                recall: 100.0,
                f1: 100.0,
            };
        }
        let pct = |num: usize, den: usize| if den == 0 { 0.0 } else { 100.0 * num as f64 / den as f64 };
        let precision = pct(self.matched, self.predicted);
        let recall = pct(self.matched, self.gold);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Scores {
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Whitespace-normalized grid. Rows may be ragged for malformed
/// predictions; `width` covers the widest row or the header row.
struct Normalized {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
    width: usize,
}

fn normalize(t: &AnswerTable) -> Normalized {
    let headers: Vec<String> = t.headers.iter().map(|h| normalize_ws(h)).collect();
    let rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| r.iter().map(|c| normalize_ws(c)).collect())
        .collect();
    let width = rows.iter().map(Vec::len).chain([headers.len()]).max().unwrap_or(0);
    Normalized {
        headers,
        rows,
        width,
    }
}

fn multiset_overlap<T: Eq + Hash>(pred: Vec<T>, gold: Vec<T>) -> MatchCounts {
    let (predicted, gold_n) = (pred.len(), gold.len());
    let mut bag: HashMap<T, usize> = HashMap::new();
    for g in gold {
        *bag.entry(g).or_default() += 1;
    }
    let mut matched = 0;
    for p in pred {
        if let Some(n) = bag.get_mut(&p) {
            if *n > 0 {
                *n -= 1;
                matched += 1;
            }
        }
    }
    MatchCounts {
        matched,
        predicted,
        gold: gold_n,
    }
}

/// Items flagged `false` count as predicted but can never match.
fn overlap_with_markers<T: Eq + Hash>(pred: Vec<(bool, T)>, gold: Vec<T>) -> MatchCounts {
    let predicted = pred.len();
    let present: Vec<T> = pred.into_iter().filter(|(ok, _)| *ok).map(|(_, t)| t).collect();
    let mut c = multiset_overlap(present, gold);
    c.predicted = predicted;
    c
}

pub fn table_em(pred: &Prediction, gold: &AnswerTable) -> bool {
    let Ok(pred) = pred else { return false };
    let norm = |v: &[String]| v.iter().map(|s| normalize_ws(s)).collect::<Vec<_>>();
    norm(&pred.headers) == norm(&gold.headers)
        && pred.rows.len() == gold.rows.len()
        && pred.rows.iter().zip(&gold.rows).all(|(p, g)| norm(p) == norm(g))
}

fn salvage(pred: &Prediction) -> &AnswerTable {
    match pred {
        Ok(t) => t,
        Err(m) => &m.salvage,
    }
}

/// A row whose length differs from the header count is unmatchable.
pub fn row_counts(pred: &Prediction, gold: &AnswerTable) -> MatchCounts {
    let p = normalize(salvage(pred));
    let g = normalize(gold);
    let arity = p.headers.len();
    let pred_rows = p.rows.into_iter().map(|r| (r.len() == arity, r)).collect();
    overlap_with_markers(pred_rows, g.rows)
}

type Column = (Option<String>, Vec<Option<String>>);

fn columns(n: &Normalized) -> Vec<(bool, Column)> {
    (0..n.width)
        .map(|j| {
            let values: Vec<Option<String>> = n.rows.iter().map(|r| r.get(j).cloned()).collect();
            let header = n.headers.get(j).cloned();
            let ok = header.is_some() && values.iter().all(Option::is_some);
            (ok, (header, values))
        })
        .collect()
}

/// A column with a missing header or a missing value is unmatchable.
pub fn col_counts(pred: &Prediction, gold: &AnswerTable) -> MatchCounts {
    let p = normalize(salvage(pred));
    let g = normalize(gold);
    let gold_cols = columns(&g).into_iter().map(|(_, c)| c).collect();
    overlap_with_markers(columns(&p), gold_cols)
}

fn cells(n: &Normalized) -> Vec<(bool, (Option<String>, String))> {
    n.rows
        .iter()
        .flat_map(|r| {
            r.iter().enumerate().map(|(j, v)| {
                let h = n.headers.get(j).cloned();
                (h.is_some(), (h, v.clone()))
            })
        })
        .collect()
}

/// A cell past the header count is unmatchable.
pub fn cell_counts(pred: &Prediction, gold: &AnswerTable) -> MatchCounts {
    let p = normalize(salvage(pred));
    let g = normalize(gold);
    let gold_cells = cells(&g).into_iter().map(|(_, c)| c).collect();
    overlap_with_markers(cells(&p), gold_cells)
}

pub fn row_scores(pred: &Prediction, gold: &AnswerTable) -> Scores {
    row_counts(pred, gold).scores()
}

pub fn col_scores(pred: &Prediction, gold: &AnswerTable) -> Scores {
    col_counts(pred, gold).scores()
}

pub fn cell_scores(pred: &Prediction, gold: &AnswerTable) -> Scores {
    cell_counts(pred, gold).scores()
}

/// Per-record match counts, summed for micro-averaging.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub records: usize,
    pub table_em: usize,
    pub malformed: usize,
    pub rows: MatchCounts,
    pub cols: MatchCounts,
    pub cells: MatchCounts,
}

impl Tally {
    pub fn score(pred: &Prediction, gold: &AnswerTable) -> Self {
        Tally {
            records: 1,
            table_em: usize::from(table_em(pred, gold)),
            malformed: usize::from(pred.is_err()),
            rows: row_counts(pred, gold),
            cols: col_counts(pred, gold),
            cells: cell_counts(pred, gold),
        }
    }

    pub fn merge(mut self, o: Tally) -> Tally {
        self.records += o.records;
        self.table_em += o.table_em;
        self.malformed += o.malformed;
        self.rows.add(o.rows);
        self.cols.add(o.cols);
        self.cells.add(o.cells);
        self
    }

    /// Scores over the tallied records; all zero when there are none.
    pub fn summary(&self) -> Summary {
        if self.records == 0 {
            let zero = Scores {
                precision: 0.0,
                recall: 0.0,
                f1: 0.0,
            };
            return Summary {
                records: 0,
                table_em_accuracy: 0.0,
                row: zero,
                col: zero,
                cell: zero,
                malformed: 0,
            };
        }
        Summary {
            records: self.records,
            table_em_accuracy: 100.0 * self.table_em as f64 / self.records as f64,
            row: self.rows.scores(),
            col: self.cols.scores(),
            cell: self.cells.scores(),
            malformed: self.malformed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub records: usize,
    pub table_em_accuracy: f64,
    pub row: Scores,
    pub col: Scores,
    pub cell: Scores,
    pub malformed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    #[serde(flatten)]
    pub overall: Summary,
    /// Every class is listed, with zero support where no record has it.
    pub per_class: BTreeMap<OperatorClass, Summary>,
}

impl MetricReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "scope,records,table_em,row_p,row_r,row_f1,col_p,col_r,col_f1,cell_p,cell_r,cell_f1,malformed\n",
        );
        let line = |s: &mut String, scope: &str, m: &Summary| {
            let _ = writeln!(
                s,
                "{scope},{},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{}",
                m.records,
                m.table_em_accuracy,
                m.row.precision,
                m.row.recall,
                m.row.f1,
                m.col.precision,
                m.col.recall,
                m.col.f1,
                m.cell.precision,
                m.cell.recall,
                m.cell.f1,
                m.malformed
            );
        };
        line(&mut s, "all", &self.overall);
        for (c, m) in &self.per_class {
            line(&mut s, c.as_str(), m);
        }
        s
    }

    pub fn to_console(&self) -> String {
        let mut s = format!(
            "{:<12} {:>7} {:>8} {:>8} {:>8} {:>8}\n",
            "scope", "records", "tableEM", "rowF1", "colF1", "cellF1"
        );
        let mut line = |scope: &str, m: &Summary| {
            let _ = writeln!(
                s,
                "{scope:<12} {:>7} {:>8.2} {:>8.2} {:>8.2} {:>8.2}",
                m.records, m.table_em_accuracy, m.row.f1, m.col.f1, m.cell.f1
            );
        };
        line("all", &self.overall);
        for (c, m) in &self.per_class {
            line(c.as_str(), m);
        }
        s
    }
}

/// One scored item: a decoded prediction, its gold table and gold classes.
pub struct EvalItem {
    pub prediction: Prediction,
    pub gold: AnswerTable,
    pub classes: Vec<OperatorClass>,
}

pub fn evaluate(items: &[EvalItem]) -> MetricReport {
    let tallies: Vec<Tally> = items
        .par_iter()
        .map(|it| Tally::score(&it.prediction, &it.gold))
        .collect();
    let overall = tallies.iter().fold(Tally::default(), |a, t| a.merge(*t));
    let mut per_class: BTreeMap<OperatorClass, Tally> =
        OperatorClass::ALL.iter().map(|&c| (c, Tally::default())).collect();
    for (it, t) in items.iter().zip(&tallies) {
        for c in &it.classes {
            let e = per_class.entry(*c).or_default();
            *e = e.merge(*t);
        }
    }
    MetricReport {
        overall: overall.summary(),
        per_class: per_class.into_iter().map(|(c, t)| (c, t.summary())).collect(),
    }
}

/// One line of a prediction or gold file.
#[derive(Debug, Clone)]
pub struct LinearizedRecord {
    pub id: String,
    pub text: String,
    pub classes: Vec<OperatorClass>,
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    answer: Option<String>,
    #[serde(default)]
    operator_classes: Option<Vec<OperatorClass>>,
    #[serde(default)]
    query_code_mixed: Option<String>,
}

/// Read `{id, text}` lines, or dataset records whose `answer` holds the
/// linearized table.
pub fn read_linearized(path: &Path) -> Result<Vec<LinearizedRecord>, MetricsError> {
    let display = path.display().to_string();
    let content = fs::read_to_string(path).map_err(|e| MetricsError::Io(display.clone(), e))?;
    let mut out = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fmt_err = |message: String| MetricsError::Format {
            path: display.clone(),
            line: i + 1,
            message,
        };
        let raw: RawRecord = serde_json::from_str(line).map_err(|e| fmt_err(e.to_string()))?;
        let text = raw
            .text
            .or(raw.answer)
            .ok_or_else(|| fmt_err("record has neither `text` nor `answer`".into()))?;
        let classes = match (raw.operator_classes, raw.query_code_mixed) {
            (Some(c), _) => c,
            (None, Some(q)) => crate::sql::parse(&q)
                .map(|ast| classify(&ast).into_iter().collect())
                .unwrap_or_default(),
            (None, None) => Vec::new(),
        };
        out.push(LinearizedRecord {
            id: raw.id,
            text,
            classes,
        });
    }
    Ok(out)
}

/// How predictions are decoded and rewritten before scoring.
#[derive(Default, Clone, Copy)]
pub struct PredictionOptions<'a> {
    /// Lexicon whose sentinels the predictions use, when it differs from
    /// the gold lexicon.
    pub lexicon: Option<&'a KeywordLexicon>,
    /// Applied to each decoded prediction, including salvaged ones.
    pub transform: Option<&'a (dyn Fn(AnswerTable) -> AnswerTable + Sync)>,
}

/// Align records by position, requiring equal ids, and decode both sides.
pub fn evaluate_records(
    pred: &[LinearizedRecord],
    gold: &[LinearizedRecord],
    lex: &KeywordLexicon,
    options: PredictionOptions<'_>,
) -> Result<MetricReport, MetricsError> {
    let n = pred.len().max(gold.len());
    for i in 0..n {
        let (p, g) = (pred.get(i), gold.get(i));
        if p.map(|r| &r.id) != g.map(|r| &r.id) {
            return Err(MetricsError::IdMismatch {
                index: i,
                pred: p.map_or("<missing>".into(), |r| r.id.clone()),
                gold: g.map_or("<missing>".into(), |r| r.id.clone()),
            });
        }
    }
    let lin = Linearizer::new(lex);
    let pred_lin = Linearizer::new(options.lexicon.unwrap_or(lex));
    let items: Vec<EvalItem> = pred
        .par_iter()
        .zip(gold)
        .map(|(p, g)| {
            let gold_table = match lin.decode(&g.text) {
                Ok(t) => t,
                Err(m) => m.salvage,
            };
            let mut prediction = pred_lin.decode(&p.text);
            if let Some(f) = options.transform {
                prediction = match prediction {
                    Ok(t) => Ok(f(t)),
                    Err(m) => Err(MalformedPrediction {
                        salvage: f(m.salvage),
                        ..m
                    }),
                };
            }
            EvalItem {
                prediction,
                gold: gold_table,
                classes: g.classes.clone(),
            }
        })
        .collect();
    Ok(evaluate(&items))
}

pub fn evaluate_file(pred_path: &Path, gold_path: &Path, lex: &KeywordLexicon) -> Result<MetricReport, MetricsError> {
    evaluate_records(
        &read_linearized(pred_path)?,
        &read_linearized(gold_path)?,
        lex,
        PredictionOptions::default(),
    )
}
