//! Two-stage filtering of generated samples: drop queries that failed to
//! execute, then drop samples whose externally computed question/query
//! similarity falls below a threshold. Also suggests a threshold from the
//! valley of a bimodal score histogram.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::executor::{AnswerTable, ExecError};
use crate::plot::bar_chart_svg;

pub const DEFAULT_THRESHOLD: f64 = 0.74;
pub const MIN_BINS: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum GateError {
    #[error("no similarity score for {} record(s): {}", .0.len(), preview(.0))]
    MissingScore(Vec<String>),
    #[error("score file line {line}: {message}")]
    ScoreFile { line: usize, message: String },
    #[error("reading score file: {0}")]
    Io(String),
}

fn preview(ids: &[String]) -> String {
    let mut s = ids.iter().take(5).cloned().collect::<Vec<_>>().join(", ");
    if ids.len() > 5 {
        s.push_str(", ...");
    }
    s
}

/// Similarity score per record id, each within [0, 1].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreFile {
    scores: HashMap<String, f64>,
}

impl ScoreFile {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, f64)>) -> Result<Self, GateError> {
        let mut scores = HashMap::new();
        for (i, (id, score)) in pairs.into_iter().enumerate() {
            let line = i + 1;
            if !(0.0..=1.0).contains(&score) {
                return Err(GateError::ScoreFile {
                    line,
                    message: format!("score {score} for {id:?} is outside [0, 1]"),
                });
            }
            if scores.insert(id.clone(), score).is_some() {
                return Err(GateError::ScoreFile {
                    line,
                    message: format!("duplicate id {id:?}"),
                });
            }
        }
        Ok(Self { scores })
    }

    /// TSV lines `record_id<TAB>score`. Blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str) -> Result<Self, GateError> {
        let mut scores = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let err = |message: String| GateError::ScoreFile { line, message };
            let (id, score) = raw
                .split_once('\t')
                .ok_or_else(|| err("expected record_id<TAB>score".into()))?;
            let score: f64 = score
                .trim()
                .parse()
                .map_err(|_| err(format!("bad score {score:?}")))?;
            if !(0.0..=1.0).contains(&score) {
                return Err(err(format!("score {score} is outside [0, 1]")));
            }
            if scores.insert(id.to_string(), score).is_some() {
                return Err(err(format!("duplicate id {id:?}")));
            }
        }
        Ok(Self { scores })
    }

    pub fn load(path: &Path) -> Result<Self, GateError> {
        let text = fs::read_to_string(path).map_err(|e| GateError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.scores.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        let mut v: Vec<(&String, &f64)> = self.scores.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v.into_iter().map(|(_, s)| *s).collect()
    }
}

/// Where every input record went. `total_in` always equals the sum of the
/// other counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    pub total_in: usize,
    pub discarded_exec_error: usize,
    pub discarded_empty_answer: usize,
    pub discarded_below_threshold: usize,
    pub retained: usize,
    pub threshold_used: Option<f64>,
}

impl GateReport {
    pub fn reconciles(&self) -> bool {
        self.total_in
            == self.discarded_exec_error
                + self.discarded_empty_answer
                + self.discarded_below_threshold
                + self.retained
    }

    /// Chain a later gate's report onto this one.
    pub fn then(&self, next: &GateReport) -> GateReport {
        GateReport {
            total_in: self.total_in,
            discarded_exec_error: self.discarded_exec_error + next.discarded_exec_error,
            discarded_empty_answer: self.discarded_empty_answer + next.discarded_empty_answer,
            discarded_below_threshold: self.discarded_below_threshold + next.discarded_below_threshold,
            retained: next.retained,
            threshold_used: next.threshold_used.or(self.threshold_used),
        }
    }
}

/// Drop records whose query failed to execute, and optionally those whose
/// answer has no rows.
pub fn gate_execution<T>(
    stream: impl IntoIterator<Item = (T, Result<AnswerTable, ExecError>)>,
    drop_empty: bool,
) -> (Vec<(T, AnswerTable)>, GateReport) {
    let mut report = GateReport::default();
    let mut kept = Vec::new();
    for (item, result) in stream {
        report.total_in += 1;
        match result {
            Err(_) => report.discarded_exec_error += 1,
            Ok(t) if drop_empty && t.rows.is_empty() => report.discarded_empty_answer += 1,
            Ok(t) => kept.push((item, t)),
        }
    }
    report.retained = kept.len();
    (kept, report)
}

/// Keep records scoring at least `threshold`. Every record must have a score.
pub fn gate_similarity<T>(
    records: Vec<T>,
    scores: &ScoreFile,
    threshold: f64,
    id_of: impl Fn(&T) -> &str,
) -> Result<(Vec<T>, GateReport), GateError> {
    let missing: Vec<String> = records
        .iter()
        .filter(|r| scores.get(id_of(r)).is_none())
        .map(|r| id_of(r).to_string())
        .collect();
    if !missing.is_empty() {
        return Err(GateError::MissingScore(missing));
    }
    let total_in = records.len();
    let kept: Vec<T> = records
        .into_iter()
        .filter(|r| scores.get(id_of(r)).unwrap() >= threshold)
        .collect();
    let report = GateReport {
        total_in,
        discarded_below_threshold: total_in - kept.len(),
        retained: kept.len(),
        threshold_used: Some(threshold),
        ..Default::default()
    };
    Ok((kept, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub counts: Vec<usize>,
}

impl Histogram {
    /// Equal-width bins over [0, 1]; the last bin includes 1.0.
    pub fn of(scores: &[f64], bins: usize) -> Self {
        let mut counts = vec![0; bins];
        for &s in scores {
            let i = ((s * bins as f64).floor() as usize).min(bins - 1);
            counts[i] += 1;
        }
        Self { counts }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bounds(&self, i: usize) -> (f64, f64) {
        let w = 1.0 / self.bins() as f64;
        (i as f64 * w, (i + 1) as f64 * w)
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        let (lo, hi) = self.bounds(i);
        (lo + hi) / 2.0
    }

    /// Moving average over each bin and its neighbours (window 3, edges use
    /// whatever neighbours exist).
    pub fn smoothed(&self) -> Vec<f64> {
        let n = self.counts.len();
        (0..n)
            .map(|i| {
                let lo = i.saturating_sub(1);
                let hi = (i + 1).min(n - 1);
                let sum: usize = self.counts[lo..=hi].iter().sum();
                sum as f64 / (hi - lo + 1) as f64
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("bin_lo,bin_hi,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            let (lo, hi) = self.bounds(i);
            let _ = writeln!(s, "{lo:.4},{hi:.4},{c}");
        }
        s
    }

    pub fn to_svg(&self, threshold: Option<f64>) -> String {
        let labels: Vec<String> = (0..self.bins()).map(|i| format!("{:.2}", self.bounds(i).0)).collect();
        let values: Vec<f64> = self.counts.iter().map(|&c| c as f64).collect();
        let title = match threshold {
            Some(t) => format!("similarity scores (threshold {t:.2})"),
            None => "similarity scores".to_string(),
        };
        bar_chart_svg(&title, &labels, &values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSuggestion {
    pub threshold: f64,
    pub valley_bin: usize,
    pub histogram: Histogram,
}

#[derive(Debug, Error, PartialEq)]
pub enum ThresholdError {
    #[error("no valley between two modes; choose a threshold by hand")]
    NoValley { histogram: Histogram },
    #[error("need at least {MIN_BINS} bins, got {0}")]
    TooFewBins(usize),
    #[error("need at least two distinct scores")]
    TooFewScores,
}

/// Maximal runs of equal values, as (start, end inclusive, value).
fn plateaus(v: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut out: Vec<(usize, usize, f64)> = Vec::new();
    for (i, &x) in v.iter().enumerate() {
        match out.last_mut() {
            Some(last) if last.2 == x => last.1 = i,
            _ => out.push((i, i, x)),
        }
    }
    out
}

/// Threshold at the deepest point between the two highest modes of the
/// smoothed histogram.
pub fn suggest_threshold(scores: &[f64], bins: usize) -> Result<ThresholdSuggestion, ThresholdError> {
    if bins < MIN_BINS {
        return Err(ThresholdError::TooFewBins(bins));
    }
    let histogram = Histogram::of(scores, bins);
    let distinct: HashSet<u64> = scores.iter().map(|s| s.to_bits()).collect();
    if distinct.len() < 2 {
        return Err(if scores.is_empty() {
            ThresholdError::TooFewScores
        } else {
            ThresholdError::NoValley { histogram }
        });
    }
    let smooth = histogram.smoothed();
    let runs = plateaus(&smooth);
    let mut peaks: Vec<usize> = (0..runs.len())
        .filter(|&k| {
            let v = runs[k].2;
            v > 0.0
                && (k == 0 || runs[k - 1].2 < v)
                && (k + 1 == runs.len() || runs[k + 1].2 < v)
        })
        .collect();
    // highest first; earlier run wins ties
    peaks.sort_by(|&a, &b| runs[b].2.total_cmp(&runs[a].2).then(a.cmp(&b)));
    if peaks.len() < 2 {
        return Err(ThresholdError::NoValley { histogram });
    }
    let (a, b) = (peaks[0].min(peaks[1]), peaks[0].max(peaks[1]));
    if b - a < 2 {
        return Err(ThresholdError::NoValley { histogram });
    }
    let between = &runs[a + 1..b];
    let min = between.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let deepest = between.iter().find(|r| r.2 == min).unwrap();
    let valley_bin = (deepest.0 + deepest.1) / 2;
    Ok(ThresholdSuggestion {
        threshold: histogram.midpoint(valley_bin),
        valley_bin,
        histogram,
    })
}
