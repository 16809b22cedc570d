//! Score predicted answer tables against gold with table exact match and
//! row, column and cell precision/recall/F1.

use tabqa::analytics::OperatorClass;
use tabqa::executor::AnswerTable;
use tabqa::metrics::{evaluate, row_scores, EvalItem};

fn table(headers: &[&str], rows: &[&[&str]]) -> AnswerTable {
    AnswerTable::new(
        headers.iter().map(|s| s.to_string()).collect(),
        rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect(),
    )
}

fn main() {
    let gold = table(&["n"], &[&["1"], &["2"]]);
    let pred = table(&["n"], &[&["1"], &["3"]]);
    println!("rows {:?}", row_scores(&Ok(pred.clone()), &gold));

    let items = vec![
        EvalItem {
            prediction: Ok(gold.clone()),
            gold: gold.clone(),
            classes: vec![OperatorClass::Sorting],
        },
        EvalItem {
            prediction: Ok(pred),
            gold: gold.clone(),
            classes: vec![OperatorClass::Filtering],
        },
        EvalItem {
            prediction: Ok(table(&["wrong header"], &[&["1"], &["2"]])),
            gold,
            classes: vec![OperatorClass::Filtering, OperatorClass::Logical],
        },
    ];
    print!("{}", evaluate(&items).to_console());
}
