//! Operator classes, query complexity and dataset statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::pipeline::DatasetRecord;
use crate::plot::bar_chart_svg;
use crate::sql::{count_keywords, BoolExpr, ParseError, QueryAst};
use crate::table_store::TableStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorClass {
    Arithmetic,
    Sorting,
    GroupBy,
    Filtering,
    SetOp,
    Logical,
}

impl OperatorClass {
    pub const ALL: [OperatorClass; 6] = [
        OperatorClass::Arithmetic,
        OperatorClass::Sorting,
        OperatorClass::GroupBy,
        OperatorClass::Filtering,
        OperatorClass::SetOp,
        OperatorClass::Logical,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OperatorClass::Arithmetic => "arithmetic",
            OperatorClass::Sorting => "sorting",
            OperatorClass::GroupBy => "group_by",
            OperatorClass::Filtering => "filtering",
            OperatorClass::SetOp => "set_op",
            OperatorClass::Logical => "logical",
        }
    }
}

impl fmt::Display for OperatorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperatorClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OperatorClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown operator class {s:?}"))
    }
}

pub type OperatorClassSet = BTreeSet<OperatorClass>;

fn has_logical(b: &BoolExpr) -> bool {
    let mut found = false;
    b.walk(&mut |node| {
        if matches!(
            node,
            BoolExpr::And(..)
                | BoolExpr::Or(..)
                | BoolExpr::Not(..)
                | BoolExpr::InList { .. }
                | BoolExpr::Between { .. }
                | BoolExpr::Like { .. }
        ) {
            found = true;
        }
    });
    found
}

/// Operator classes present in a query. `distinct`, `limit` and `is null`
/// belong to no class.
pub fn classify(ast: &QueryAst) -> OperatorClassSet {
    let mut out = OperatorClassSet::new();
    if ast.all_exprs().iter().any(|e| e.is_aggregate()) {
        out.insert(OperatorClass::Arithmetic);
    }
    if !ast.order_by.is_empty() {
        out.insert(OperatorClass::Sorting);
    }
    if !ast.group_by.is_empty() {
        out.insert(OperatorClass::GroupBy);
    }
    if ast.where_clause.is_some() || ast.having.is_some() {
        out.insert(OperatorClass::Filtering);
    }
    if ast.where_clause.iter().chain(&ast.having).any(has_logical) {
        out.insert(OperatorClass::Logical);
    }
    if let Some((_, rhs)) = &ast.set_op {
        out.insert(OperatorClass::SetOp);
        out.extend(classify(rhs));
    }
    out
}

/// Number of inventory keywords in a query.
pub fn complexity(query_text: &str) -> Result<usize, ParseError> {
    count_keywords(query_text)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct StatsReport {
    pub records: usize,
    pub class_counts: BTreeMap<OperatorClass, usize>,
    pub keyword_histogram: BTreeMap<usize, usize>,
    pub distinct_tables: usize,
    pub table_rows_histogram: BTreeMap<usize, usize>,
    pub table_columns_histogram: BTreeMap<usize, usize>,
    /// Queries using `distinct` or `limit`, which carry no operator class.
    pub uses_distinct: usize,
    pub uses_limit: usize,
}

impl StatsReport {
    fn empty() -> Self {
        StatsReport {
            class_counts: OperatorClass::ALL.iter().map(|&c| (c, 0)).collect(),
            ..Default::default()
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("section,key,count\n");
        s.push_str(&format!("total,records,{}\n", self.records));
        s.push_str(&format!("total,tables,{}\n", self.distinct_tables));
        for (c, n) in &self.class_counts {
            s.push_str(&format!("operator_class,{c},{n}\n"));
        }
        for (k, n) in &self.keyword_histogram {
            s.push_str(&format!("keyword_count,{k},{n}\n"));
        }
        for (k, n) in &self.table_rows_histogram {
            s.push_str(&format!("table_rows,{k},{n}\n"));
        }
        for (k, n) in &self.table_columns_histogram {
            s.push_str(&format!("table_columns,{k},{n}\n"));
        }
        s.push_str(&format!("unclassified,distinct,{}\n", self.uses_distinct));
        s.push_str(&format!("unclassified,limit,{}\n", self.uses_limit));
        s
    }

    pub fn keyword_svg(&self) -> String {
        let (labels, values): (Vec<String>, Vec<f64>) = self
            .keyword_histogram
            .iter()
            .map(|(k, n)| (k.to_string(), *n as f64))
            .unzip();
        bar_chart_svg("queries by keyword count", &labels, &values)
    }

    pub fn class_svg(&self) -> String {
        let (labels, values): (Vec<String>, Vec<f64>) = self
            .class_counts
            .iter()
            .map(|(c, n)| (c.to_string(), *n as f64))
            .unzip();
        bar_chart_svg("queries by operator class", &labels, &values)
    }
}

/// Tally classes, keyword counts and table shapes. Table shapes are filled
/// only for tables found in `store`.
pub fn dataset_stats(records: &[DatasetRecord], store: Option<&TableStore>) -> StatsReport {
    let mut report = StatsReport::empty();
    let mut tables = BTreeSet::new();
    for r in records {
        report.records += 1;
        for c in &r.operator_classes {
            *report.class_counts.entry(*c).or_default() += 1;
        }
        *report.keyword_histogram.entry(r.keyword_count).or_default() += 1;
        if let Ok(ast) = crate::sql::parse(&r.query_code_mixed) {
            report.uses_distinct += usize::from(uses(&ast, |q| q.distinct));
            report.uses_limit += usize::from(uses(&ast, |q| q.limit.is_some()));
        }
        tables.insert(r.input_table_id.as_str());
    }
    report.distinct_tables = tables.len();
    if let Some(store) = store {
        for t in tables.iter().filter_map(|id| store.get(id)) {
            *report.table_rows_histogram.entry(t.num_rows()).or_default() += 1;
            *report.table_columns_histogram.entry(t.num_columns()).or_default() += 1;
        }
    }
    report
}

fn uses(q: &QueryAst, f: impl Fn(&QueryAst) -> bool + Copy) -> bool {
    f(q) || q.set_op.as_ref().is_some_and(|(_, rhs)| uses(rhs, f))
}
