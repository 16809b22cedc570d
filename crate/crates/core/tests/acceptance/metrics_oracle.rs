//! Hand-built prediction/gold pairs scored by the library and by an
//! exhaustive matcher written from the metric definitions.

use tabqa::executor::AnswerTable;
use tabqa::linearizer::MalformedPrediction;
use tabqa::metrics::{cell_scores, col_scores, row_scores, table_em, Prediction, Scores};

fn t(headers: &[&str], rows: &[&[&str]]) -> AnswerTable {
    AnswerTable::new(
        headers.iter().map(|s| s.to_string()).collect(),
        rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect(),
    )
}

fn ok(headers: &[&str], rows: &[&[&str]]) -> Prediction {
    Ok(t(headers, rows))
}

fn malformed(salvage: AnswerTable) -> Prediction {
    Err(MalformedPrediction {
        reason: "constructed".into(),
        salvage,
    })
}

pub struct Case {
    pub name: &'static str,
    pub pred: Prediction,
    pub gold: AnswerTable,
    /// Row, column and cell F1 worked out by hand, where the case pins them.
    pub expected_f1: Option<[f64; 3]>,
}

fn case(name: &'static str, pred: Prediction, gold: AnswerTable) -> Case {
    Case {
        name,
        pred,
        gold,
        expected_f1: None,
    }
}

fn pinned(name: &'static str, pred: Prediction, gold: AnswerTable, f1: [f64; 3]) -> Case {
    Case {
        expected_f1: Some(f1),
        ..case(name, pred, gold)
    }
}

pub fn cases() -> Vec<Case> {
    let g22 = t(&["a", "b"], &[&["1", "2"], &["3", "4"]]);
    vec![
        pinned("identical 2x2", Ok(g22.clone()), g22.clone(), [100.0, 100.0, 100.0]),
        pinned("one of two rows right", ok(&["x"], &[&["1"], &["3"]]), t(&["x"], &[&["1"], &["2"]]), [50.0, 0.0, 50.0]),
        pinned("duplicate gold rows", ok(&["x"], &[&["a"]]), t(&["x"], &[&["a"], &["a"]]), [200.0 / 3.0, 0.0, 200.0 / 3.0]),
        pinned(
            "wrong header",
            ok(&["name"], &[&["৪"]]),
            t(&["গণনা(name)"], &[&["৪"]]),
            [100.0, 0.0, 0.0],
        ),
        pinned("rows swapped", ok(&["x"], &[&["2"], &["1"]]), t(&["x"], &[&["1"], &["2"]]), [100.0, 0.0, 100.0]),
        case("duplicated column", ok(&["a", "a"], &[&["1", "1"], &["2", "2"]]), t(&["a"], &[&["1"], &["2"]])),
        pinned("two cell errors", ok(&["a", "b"], &[&["1", "9"], &["3", "8"]]), g22.clone(), [0.0, 50.0, 50.0]),
        pinned("both empty", ok(&["x"], &[]), t(&["x"], &[]), [100.0, 100.0, 100.0]),
        case("hallucinated column", ok(&["a", "z"], &[&["1", "q"], &["2", "r"]]), t(&["a"], &[&["1"], &["2"]])),
        pinned("empty prediction", ok(&["x"], &[]), t(&["x"], &[&["1"], &["2"]]), [0.0, 0.0, 0.0]),
        pinned("whitespace differences", ok(&[" city "], &[&["New  Delhi"]]), t(&["city"], &[&["New Delhi"]]), [100.0, 100.0, 100.0]),
        case("ragged salvage", malformed(t(&["a", "b"], &[&["1", "2"], &["3"]])), g22.clone()),
        case("nothing salvaged", malformed(AnswerTable::default()), g22.clone()),
        case("digit scripts differ", ok(&["x"], &[&["৫"]]), t(&["x"], &[&["5"]])),
        pinned(
            "gold against gold with repeats",
            ok(&["p", "q", "r"], &[&["1", "a", ""], &["1", "a", ""], &["2", "b", "c"], &["3", "c", "d"], &["1", "a", ""]]),
            t(&["p", "q", "r"], &[&["1", "a", ""], &["1", "a", ""], &["2", "b", "c"], &["3", "c", "d"], &["1", "a", ""]]),
            [100.0, 100.0, 100.0],
        ),
        case("extra rows", ok(&["x"], &[&["1"], &["2"], &["3"], &["4"]]), t(&["x"], &[&["1"], &["2"]])),
        case("column order of values", ok(&["x", "y"], &[&["2", "a"], &["1", "b"]]), t(&["x", "y"], &[&["1", "a"], &["2", "b"]])),
        case("tripled row", ok(&["x"], &[&["1"], &["1"], &["1"]]), t(&["x"], &[&["1"]])),
        case("header case", ok(&["Name"], &[&["a"]]), t(&["name"], &[&["a"]])),
        case("rows where none expected", ok(&["n"], &[&["0"]]), t(&["n"], &[])),
        pinned("single column exact", ok(&["সর্বোচ্চ(`দূরত্ব`)"], &[&["১২"]]), t(&["সর্বোচ্চ(`দূরত্ব`)"], &[&["১২"]]), [100.0, 100.0, 100.0]),
        case("cell multiplicity", ok(&["x"], &[&["1"], &["1"]]), t(&["x"], &[&["1"], &["1"], &["1"]])),
        case("columns swapped", ok(&["b", "a"], &[&["2", "1"], &["4", "3"]]), g22.clone()),
        pinned(
            "sentinel-like cells",
            ok(&["কলাম"], &[&["<রো ১>"], &["a | b"]]),
            t(&["কলাম"], &[&["<রো ১>"], &["a | b"]]),
            [100.0, 100.0, 100.0],
        ),
        case(
            "mixed partial credit",
            ok(&["a", "b", "c"], &[&["1", "x", "p"], &["2", "y", "q"], &["9", "z", "r"]]),
            t(&["a", "b", "d"], &[&["1", "x", "p"], &["2", "w", "q"]]),
        ),
    ]
}

fn norm(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Largest matching between predicted and gold items, found by trying
/// every assignment. `None` items can never match.
fn best_matching<T: PartialEq>(pred: &[Option<T>], gold: &[T], used: &mut Vec<bool>) -> usize {
    let Some((first, rest)) = pred.split_first() else {
        return 0;
    };
    let mut best = best_matching(rest, gold, used);
    if let Some(p) = first {
        for j in 0..gold.len() {
            if !used[j] && gold[j] == *p {
                used[j] = true;
                best = best.max(1 + best_matching(rest, gold, used));
                used[j] = false;
            }
        }
    }
    best
}

fn scores<T: PartialEq>(pred: &[Option<T>], gold: &[T]) -> Scores {
    let m = best_matching(pred, gold, &mut vec![false; gold.len()]) as f64;
    let (np, ng) = (pred.len() as f64, gold.len() as f64);
    if np == 0.0 && ng == 0.0 {
        return Scores {
            precision: 100.0,
            recall: 100.0,
            f1: 100.0,
        };
    }
    let precision = if np == 0.0 { 0.0 } else { 100.0 * m / np };
    let recall = if ng == 0.0 { 0.0 } else { 100.0 * m / ng };
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    Scores { precision, recall, f1 }
}

struct Grid {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn grid(t: &AnswerTable) -> Grid {
    Grid {
        headers: t.headers.iter().map(|h| norm(h)).collect(),
        rows: t.rows.iter().map(|r| r.iter().map(|c| norm(c)).collect()).collect(),
    }
}

type Column = (String, Vec<String>);

fn oracle_rows(p: &Grid, g: &Grid) -> Scores {
    let pred: Vec<Option<Vec<String>>> =
        p.rows.iter().map(|r| (r.len() == p.headers.len()).then(|| r.clone())).collect();
    scores(&pred, &g.rows)
}

fn columns_of(g: &Grid) -> Vec<Option<Column>> {
    let width = g.rows.iter().map(Vec::len).chain([g.headers.len()]).max().unwrap_or(0);
    (0..width)
        .map(|j| {
            let header = g.headers.get(j)?.clone();
            let values: Option<Vec<String>> = g.rows.iter().map(|r| r.get(j).cloned()).collect();
            Some((header, values?))
        })
        .collect()
}

fn oracle_cols(p: &Grid, g: &Grid) -> Scores {
    let gold: Vec<Column> = columns_of(g).into_iter().flatten().collect();
    scores(&columns_of(p), &gold)
}

fn cells_of(g: &Grid) -> Vec<Option<(String, String)>> {
    g.rows
        .iter()
        .flat_map(|r| r.iter().enumerate().map(|(j, v)| g.headers.get(j).map(|h| (h.clone(), v.clone()))))
        .collect()
}

fn oracle_cells(p: &Grid, g: &Grid) -> Scores {
    let gold: Vec<(String, String)> = cells_of(g).into_iter().flatten().collect();
    scores(&cells_of(p), &gold)
}

fn oracle_em(pred: &Prediction, gold: &AnswerTable) -> bool {
    let Ok(p) = pred else { return false };
    let (p, g) = (grid(p), grid(gold));
    p.headers == g.headers && p.rows == g.rows
}

fn close(a: &Scores, b: &Scores) -> bool {
    (a.precision - b.precision).abs() <= 0.01 && (a.recall - b.recall).abs() <= 0.01 && (a.f1 - b.f1).abs() <= 0.01
}

/// Cases that disagree with the oracle or with their hand-worked values.
pub fn disagreements() -> (usize, Vec<String>) {
    let cases = cases();
    let mut bad = Vec::new();
    for c in &cases {
        let salvage = match &c.pred {
            Ok(t) => t,
            Err(m) => &m.salvage,
        };
        let (p, g) = (grid(salvage), grid(&c.gold));
        let ours = [row_scores(&c.pred, &c.gold), col_scores(&c.pred, &c.gold), cell_scores(&c.pred, &c.gold)];
        let oracle = [oracle_rows(&p, &g), oracle_cols(&p, &g), oracle_cells(&p, &g)];
        for (k, (a, b)) in ours.iter().zip(&oracle).enumerate() {
            if !close(a, b) {
                bad.push(format!("{} [{}]: ours {a:?}, oracle {b:?}", c.name, ["row", "col", "cell"][k]));
            }
            if let Some(f1) = c.expected_f1 {
                if (a.f1 - f1[k]).abs() > 0.01 {
                    bad.push(format!("{} [{}]: f1 {} but {} by hand", c.name, ["row", "col", "cell"][k], a.f1, f1[k]));
                }
            }
        }
        if table_em(&c.pred, &c.gold) != oracle_em(&c.pred, &c.gold) {
            bad.push(format!("{}: table EM differs", c.name));
        }
    }
    (cases.len(), bad)
}
