use std::collections::HashSet;
use std::path::Path;

use serde::Serialize;

use super::{DatasetRecord, PipelineError};
use crate::analytics::OperatorClass;
use crate::hashing::stable_u64;

pub const SHEET_HEADERS: [&str; 9] = [
    "id",
    "operator_class",
    "input_table_id",
    "query_code_mixed",
    "query_monolingual",
    "answer",
    "annotator_question",
    "rating_1",
    "rating_2",
];

/// Pick `k` records for human annotation, spread evenly over the operator
/// classes, from tables not in `excluded_tables`. Returns each pick with
/// the class it was drawn for.
pub fn annotation_sheet<'a>(
    records: &'a [DatasetRecord],
    excluded_tables: &HashSet<String>,
    k: usize,
    seed: u64,
) -> Result<Vec<(OperatorClass, &'a DatasetRecord)>, PipelineError> {
    let candidates: Vec<&DatasetRecord> = records
        .iter()
        .filter(|r| !excluded_tables.contains(&r.input_table_id))
        .collect();
    if k > candidates.len() {
        return Err(PipelineError::InsufficientClassCoverage(format!(
            "asked for {k} records, {} eligible",
            candidates.len()
        )));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut pools: Vec<Vec<usize>> = OperatorClass::ALL
        .iter()
        .map(|c| {
            let mut idx: Vec<usize> = (0..candidates.len())
                .filter(|&i| candidates[i].operator_classes.contains(c))
                .collect();
            idx.sort_by_key(|&i| (stable_u64(&[&seed.to_le_bytes(), candidates[i].id.as_bytes()]), i));
            idx.reverse(); // pop from the end
            idx
        })
        .collect();
    let empty: Vec<&str> = OperatorClass::ALL
        .iter()
        .zip(&pools)
        .filter(|(_, p)| p.is_empty())
        .map(|(c, _)| c.as_str())
        .collect();
    if !empty.is_empty() {
        return Err(PipelineError::InsufficientClassCoverage(format!(
            "no eligible records for {}",
            empty.join(", ")
        )));
    }

    let n = OperatorClass::ALL.len();
    let mut chosen: HashSet<usize> = HashSet::new();
    let mut out = Vec::with_capacity(k);
    let mut take = |class: usize, pools: &mut Vec<Vec<usize>>, out: &mut Vec<(OperatorClass, &'a DatasetRecord)>| {
        while let Some(i) = pools[class].pop() {
            if chosen.insert(i) {
                out.push((OperatorClass::ALL[class], candidates[i]));
                return true;
            }
        }
        false
    };
    for class in 0..n {
        let share = k / n + usize::from(class < k % n);
        for _ in 0..share {
            if !take(class, &mut pools, &mut out) {
                break;
            }
        }
    }
    // classes short of their share leave room for the others
    let mut progress = true;
    while out.len() < k && progress {
        progress = false;
        for class in 0..n {
            if out.len() < k && take(class, &mut pools, &mut out) {
                progress = true;
            }
        }
    }
    if out.len() < k {
        return Err(PipelineError::InsufficientClassCoverage(format!(
            "only {} classified records available for {k}",
            out.len()
        )));
    }
    out.sort_by_key(|(c, r)| (*c, r.id.clone()));
    Ok(out)
}

pub fn write_sheet(path: &Path, rows: &[(OperatorClass, &DatasetRecord)]) -> Result<(), PipelineError> {
    let io = |e: csv::Error| PipelineError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(SHEET_HEADERS).map_err(io)?;
    for (class, r) in rows {
        w.write_record([
            r.id.as_str(),
            class.as_str(),
            &r.input_table_id,
            &r.query_code_mixed,
            &r.query_monolingual,
            &r.answer,
            "",
            "",
            "",
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| PipelineError::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnotationSummary {
    pub rows: usize,
    pub questions_written: usize,
    /// Mean of every rating on the sheet.
    pub mean_fluency: f64,
    pub mean_per_evaluator: [f64; 2],
}

/// Check a filled sheet (both ratings present, integers 1..=5) and average
/// the ratings.
pub fn import_annotations(path: &Path) -> Result<AnnotationSummary, PipelineError> {
    let fmt = |message: String| PipelineError::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| fmt(e.to_string()))?;
    let headers = reader.headers().map_err(|e| fmt(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| fmt(format!("missing column {name:?}")))
    };
    let (q, r1, r2) = (col("annotator_question")?, col("rating_1")?, col("rating_2")?);
    let mut sums = [0u64; 2];
    let mut rows = 0;
    let mut questions = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| fmt(e.to_string()))?;
        let row = i + 1;
        for (e, c) in [r1, r2].into_iter().enumerate() {
            let raw = record.get(c).unwrap_or("").trim();
            let rating: u8 = raw.parse().map_err(|_| PipelineError::Annotation {
                row,
                message: format!("rating_{} {raw:?} is not an integer", e + 1),
            })?;
            if !(1..=5).contains(&rating) {
                return Err(PipelineError::Annotation {
                    row,
                    message: format!("rating_{} is {rating}, outside 1..5", e + 1),
                });
            }
            sums[e] += u64::from(rating);
        }
        questions += usize::from(!record.get(q).unwrap_or("").trim().is_empty());
        rows += 1;
    }
    let mean = |s: u64, n: usize| if n == 0 { 0.0 } else { s as f64 / n as f64 };
    Ok(AnnotationSummary {
        rows,
        questions_written: questions,
        mean_fluency: mean(sums[0] + sums[1], rows * 2),
        mean_per_evaluator: [mean(sums[0], rows), mean(sums[1], rows)],
    })
}
