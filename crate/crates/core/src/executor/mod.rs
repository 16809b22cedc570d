//! In-memory evaluation of parsed queries against a single table.
//!
//! Values follow the ordering of the reference engine used in the
//! differential tests: empty < number < text, numbers by decimal value,
//! text by code point. Comparisons involving an empty cell are unknown.

mod value;

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use rust_decimal::{Decimal, RoundingStrategy};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::KeywordLexicon;
use crate::sql::{
    quote_ident, AggArg, AggFunc, BoolExpr, CmpOp, Expr, Ident, Literal, ParseError, QueryAst,
    SelectItem, SetOp,
};
use crate::table_store::{CellKind, Table, TableStore};
use crate::template_engine::Instantiation;

pub use value::{Truth, Val, ValKey};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("type error: {0}")]
    TypeError(String),
    #[error("unknown table {0:?}")]
    UnknownTable(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Result of a query: a rectangular grid of cell strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct AnswerTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl AnswerTable {
    pub fn new(headers: Vec<String>, rows: Vec<Vec<String>>) -> Self {
        Self { headers, rows }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_columns(&self) -> usize {
        self.headers.len()
    }

    pub fn is_rectangular(&self) -> bool {
        self.rows.iter().all(|r| r.len() == self.headers.len())
    }
}

/// Rows as typed values, before rendering to strings.
struct Relation {
    headers: Vec<String>,
    rows: Vec<Vec<Val>>,
}

/// One produced row, with its sort keys already evaluated in source context.
struct OutRow {
    values: Vec<Val>,
    sort_keys: Vec<Val>,
}

pub fn execute(ast: &QueryAst, table: &Table, lex: &KeywordLexicon) -> Result<AnswerTable, ExecError> {
    let ctx = Ctx { table, lex };
    let rel = ctx.query(ast)?;
    Ok(AnswerTable {
        headers: rel.headers,
        rows: rel
            .rows
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.render(lex)).collect())
            .collect(),
    })
}

/// Parse and execute every instantiation against its table. Output order
/// matches input order; failures are captured per record.
pub fn execute_batch(
    instantiations: Vec<Instantiation>,
    store: &TableStore,
    lex: &KeywordLexicon,
) -> Vec<(Instantiation, Result<AnswerTable, ExecError>)> {
    instantiations
        .into_par_iter()
        .map(|inst| {
            let result = execute_text(&inst.query_text, store.get(&inst.table_id), &inst.table_id, lex);
            (inst, result)
        })
        .collect()
}

fn execute_text(
    query: &str,
    table: Option<&Arc<Table>>,
    table_id: &str,
    lex: &KeywordLexicon,
) -> Result<AnswerTable, ExecError> {
    let table = table.ok_or_else(|| ExecError::UnknownTable(table_id.to_string()))?;
    let ast = crate::sql::parse(query)?;
    execute(&ast, table, lex)
}

struct Ctx<'a> {
    table: &'a Table,
    lex: &'a KeywordLexicon,
}

/// The rows an expression is evaluated against: a single source row, or a
/// group of rows for aggregates.
#[derive(Clone, Copy)]
enum Scope<'r> {
    Row(usize),
    Group(&'r [usize]),
}

impl<'a> Ctx<'a> {
    fn bind(&self, ident: &Ident) -> Result<usize, ExecError> {
        self.table
            .column_index(ident.as_str())
            .ok_or_else(|| ExecError::UnknownColumn(ident.to_string()))
    }

    fn cell(&self, row: usize, col: usize) -> Val {
        Val::from_cell(&self.table.rows()[row][col])
    }

    fn query(&self, q: &QueryAst) -> Result<Relation, ExecError> {
        let Some((op, rhs)) = &q.set_op else {
            let (headers, mut rows) = self.core(q, true)?;
            stable_sort(&mut rows, &q.order_by.iter().map(|o| o.descending()).collect::<Vec<_>>());
            return Ok(limit(headers, rows, q.limit));
        };

        let (headers, left) = self.core(q, false)?;
        let right = self.query(rhs)?;
        if let Some(r) = right.rows.first() {
            if r.len() != headers.len() {
                return Err(ExecError::TypeError(format!(
                    "set operation combines {} columns with {}",
                    headers.len(),
                    r.len()
                )));
            }
        }
        let left: Vec<Vec<Val>> = left.into_iter().map(|r| r.values).collect();
        let right_keys: HashSet<Vec<ValKey>> = right.rows.iter().map(|r| row_key(r)).collect();
        let mut seen = HashSet::new();
        let mut combined = Vec::new();
        let candidates: Box<dyn Iterator<Item = Vec<Val>>> = match op {
            SetOp::Union => Box::new(left.into_iter().chain(right.rows)),
            _ => Box::new(left.into_iter()),
        };
        for row in candidates {
            let key = row_key(&row);
            let keep = match op {
                SetOp::Union => true,
                SetOp::Intersect => right_keys.contains(&key),
                SetOp::Except => !right_keys.contains(&key),
            };
            if keep && seen.insert(key) {
                combined.push(row);
            }
        }

        let mut order_cols = Vec::with_capacity(q.order_by.len());
        for item in &q.order_by {
            order_cols.push(self.output_position(q, &item.expr)?);
        }
        let mut rows: Vec<OutRow> = combined
            .into_iter()
            .map(|values| OutRow {
                sort_keys: order_cols.iter().map(|&i| values[i].clone()).collect(),
                values,
            })
            .collect();
        stable_sort(&mut rows, &q.order_by.iter().map(|o| o.descending()).collect::<Vec<_>>());
        Ok(limit(headers, rows, q.limit))
    }

    /// Position of an ORDER BY term in the output of a compound query.
    fn output_position(&self, q: &QueryAst, e: &Expr) -> Result<usize, ExecError> {
        let mut pos = 0;
        for item in &q.select_items {
            match item {
                SelectItem::Star => {
                    if let Expr::Column(c) = e {
                        let idx = self.bind(c)?;
                        return Ok(pos + idx);
                    }
                    pos += self.table.num_columns();
                }
                SelectItem::Expr(x) => {
                    let same_column = match (x, e) {
                        (Expr::Column(a), Expr::Column(b)) => {
                            self.bind(a).is_ok() && self.bind(a).ok() == self.bind(b).ok()
                        }
                        _ => false,
                    };
                    if x == e || same_column {
                        return Ok(pos);
                    }
                    pos += 1;
                }
            }
        }
        Err(ExecError::TypeError(
            "order by term of a set operation must name an output column".into(),
        ))
    }

    /// Evaluate a query without its set operation. Sort keys are filled when
    /// `with_order` is set.
    fn core(&self, q: &QueryAst, with_order: bool) -> Result<(Vec<String>, Vec<OutRow>), ExecError> {
        let headers = self.headers(q)?;
        self.check_columns(q)?;

        let mut filtered = Vec::new();
        for i in 0..self.table.num_rows() {
            let keep = match &q.where_clause {
                Some(w) => self.eval_bool(w, Scope::Row(i))? == Truth::True,
                None => true,
            };
            if keep {
                filtered.push(i);
            }
        }

        let order: &[crate::sql::OrderItem] = if with_order { &q.order_by } else { &[] };
        let aggregated = !q.group_by.is_empty()
            || q.has_aggregate_select()
            || q.having.is_some()
            || order.iter().any(|o| o.expr.is_aggregate());

        let mut rows = Vec::new();
        if aggregated {
            let group_cols: Vec<usize> = q.group_by.iter().map(|g| self.bind(g)).collect::<Result<_, _>>()?;
            for item in &q.select_items {
                match item {
                    SelectItem::Star => {
                        return Err(ExecError::TypeError("`*` in an aggregate query".into()))
                    }
                    SelectItem::Expr(e) => self.check_grouped(e, &group_cols)?,
                }
            }
            for o in order {
                self.check_grouped(&o.expr, &group_cols)?;
            }
            if let Some(h) = &q.having {
                for e in h.exprs() {
                    self.check_grouped(e, &group_cols)?;
                }
            }

            let groups = if group_cols.is_empty() {
                vec![filtered]
            } else {
                let mut index: HashMap<Vec<ValKey>, usize> = HashMap::new();
                let mut groups: Vec<Vec<usize>> = Vec::new();
                for &r in &filtered {
                    let key: Vec<ValKey> = group_cols.iter().map(|&c| self.cell(r, c).key()).collect();
                    let slot = *index.entry(key).or_insert_with(|| {
                        groups.push(Vec::new());
                        groups.len() - 1
                    });
                    groups[slot].push(r);
                }
                groups
            };

            for g in &groups {
                let scope = Scope::Group(g);
                if let Some(h) = &q.having {
                    if self.eval_bool(h, scope)? != Truth::True {
                        continue;
                    }
                }
                let values = q
                    .select_items
                    .iter()
                    .map(|item| match item {
                        SelectItem::Expr(e) => self.eval(e, scope).map(|v| for_output(e, v)),
                        SelectItem::Star => unreachable!("rejected above"),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let sort_keys = order
                    .iter()
                    .map(|o| self.eval(&o.expr, scope))
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push(OutRow { values, sort_keys });
            }
        } else {
            for &r in &filtered {
                let mut values = Vec::with_capacity(headers.len());
                for item in &q.select_items {
                    match item {
                        SelectItem::Star => {
                            values.extend((0..self.table.num_columns()).map(|c| self.cell(r, c)))
                        }
                        SelectItem::Expr(e) => values.push(self.eval(e, Scope::Row(r))?),
                    }
                }
                let sort_keys = order
                    .iter()
                    .map(|o| self.eval(&o.expr, Scope::Row(r)))
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push(OutRow { values, sort_keys });
            }
        }

        if q.distinct {
            let mut seen = HashSet::new();
            rows.retain(|r| seen.insert(row_key(&r.values)));
        }
        Ok((headers, rows))
    }

    /// Reject unknown columns anywhere in the query core, including clauses
    /// that might never be evaluated on an empty table.
    fn check_columns(&self, q: &QueryAst) -> Result<(), ExecError> {
        for g in &q.group_by {
            self.bind(g)?;
        }
        let mut exprs: Vec<&Expr> = q
            .select_items
            .iter()
            .filter_map(|i| match i {
                SelectItem::Expr(e) => Some(e),
                SelectItem::Star => None,
            })
            .collect();
        if let Some(w) = &q.where_clause {
            exprs.extend(w.exprs());
        }
        if let Some(h) = &q.having {
            exprs.extend(h.exprs());
        }
        exprs.extend(q.order_by.iter().map(|o| &o.expr));
        for e in exprs {
            match e {
                Expr::Column(c) | Expr::Aggregate { arg: AggArg::Column(c), .. } => {
                    self.bind(c)?;
                }
                _ => {}
            }
            if let Expr::Aggregate {
                func: func @ (AggFunc::Sum | AggFunc::Avg),
                arg: AggArg::Column(c),
            } = e
            {
                if self.table.column_kind(self.bind(c)?) == CellKind::Text {
                    return Err(ExecError::TypeError(format!(
                        "{}(`{}`) over a text column",
                        func.keyword(),
                        c
                    )));
                }
            }
        }
        if let Some(w) = &q.where_clause {
            if w.exprs().iter().any(|e| e.is_aggregate()) {
                return Err(ExecError::TypeError("aggregate in where clause".into()));
            }
        }
        Ok(())
    }

    fn check_grouped(&self, e: &Expr, group_cols: &[usize]) -> Result<(), ExecError> {
        if let Expr::Column(c) = e {
            if !group_cols.contains(&self.bind(c)?) {
                return Err(ExecError::TypeError(format!(
                    "column `{c}` is neither grouped nor aggregated"
                )));
            }
        }
        Ok(())
    }

    fn headers(&self, q: &QueryAst) -> Result<Vec<String>, ExecError> {
        let mut out = Vec::new();
        for item in &q.select_items {
            match item {
                SelectItem::Star => out.extend(self.table.headers().iter().cloned()),
                SelectItem::Expr(Expr::Column(c)) => {
                    out.push(self.table.headers()[self.bind(c)?].clone())
                }
                SelectItem::Expr(Expr::Literal(l)) => out.push(l.text().to_string()),
                SelectItem::Expr(Expr::Aggregate { func, arg }) => {
                    let name = self.lex.localize(func.keyword()).unwrap_or(func.keyword());
                    let inner = match arg {
                        AggArg::Star => "*".to_string(),
                        AggArg::Column(c) => quote_ident(&self.table.headers()[self.bind(c)?]),
                    };
                    out.push(format!("{name}({inner})"));
                }
            }
        }
        Ok(out)
    }

    fn eval(&self, e: &Expr, scope: Scope<'_>) -> Result<Val, ExecError> {
        match e {
            Expr::Literal(Literal::Number(n)) => Ok(Val::number_literal(n)),
            Expr::Literal(Literal::Str(s)) => Ok(Val::string_literal(s)),
            Expr::Column(c) => {
                let col = self.bind(c)?;
                let row = match scope {
                    Scope::Row(r) => r,
                    // grouped columns are constant within a group
                    Scope::Group(rows) => match rows.first() {
                        Some(&r) => r,
                        None => return Ok(Val::Null),
                    },
                };
                Ok(self.cell(row, col))
            }
            Expr::Aggregate { func, arg } => {
                let Scope::Group(rows) = scope else {
                    return Err(ExecError::TypeError("aggregate outside a grouped context".into()));
                };
                self.aggregate(*func, arg, rows)
            }
        }
    }

    fn aggregate(&self, func: AggFunc, arg: &AggArg, rows: &[usize]) -> Result<Val, ExecError> {
        let col = match arg {
            AggArg::Star if func == AggFunc::Count => {
                return Ok(Val::computed(Decimal::from(rows.len())))
            }
            AggArg::Star => {
                return Err(ExecError::TypeError(format!("{}(*) is not defined", func.keyword())))
            }
            AggArg::Column(c) => self.bind(c)?,
        };
        let cells = rows.iter().map(|&r| self.cell(r, col)).filter(|v| !v.is_null());
        match func {
            AggFunc::Count => Ok(Val::computed(Decimal::from(cells.count()))),
            AggFunc::Sum | AggFunc::Avg => {
                if self.table.column_kind(col) == CellKind::Text {
                    return Err(ExecError::TypeError(format!(
                        "{}(`{}`) over a text column",
                        func.keyword(),
                        self.table.headers()[col]
                    )));
                }
                let mut total = Decimal::ZERO;
                let mut n = 0u64;
                for v in cells {
                    let x = v.numeric().expect("numeric column holds only numbers");
                    total = total.checked_add(x).ok_or_else(|| {
                        ExecError::TypeError(format!("{} overflows", func.keyword()))
                    })?;
                    n += 1;
                }
                match (func, n) {
                    (AggFunc::Sum, 0) => Ok(Val::Null),
                    (AggFunc::Sum, _) => Ok(Val::computed(total)),
                    (_, 0) => Err(ExecError::TypeError(format!(
                        "avg(`{}`) has no non-empty cells",
                        self.table.headers()[col]
                    ))),
                    _ => {
                        Ok(Val::computed(total / Decimal::from(n)))
                    }
                }
            }
            AggFunc::Min | AggFunc::Max => {
                let mut best: Option<Val> = None;
                for v in cells {
                    let better = match &best {
                        None => true,
                        Some(b) if func == AggFunc::Min => v.cmp_sql(b).is_lt(),
                        Some(b) => v.cmp_sql(b).is_gt(),
                    };
                    if better {
                        best = Some(v);
                    }
                }
                Ok(best.unwrap_or(Val::Null))
            }
        }
    }

    fn eval_bool(&self, b: &BoolExpr, scope: Scope<'_>) -> Result<Truth, ExecError> {
        Ok(match b {
            BoolExpr::And(l, r) => self.eval_bool(l, scope)?.and(self.eval_bool(r, scope)?),
            BoolExpr::Or(l, r) => self.eval_bool(l, scope)?.or(self.eval_bool(r, scope)?),
            BoolExpr::Not(x) => self.eval_bool(x, scope)?.not(),
            BoolExpr::Compare { left, op, right } => {
                compare(&self.eval(left, scope)?, *op, &self.eval(right, scope)?)
            }
            BoolExpr::InList { expr, list, negated } => {
                let v = self.eval(expr, scope)?;
                let mut t = Truth::False;
                for item in list {
                    t = t.or(compare(&v, CmpOp::Eq, &self.eval(item, scope)?));
                }
                if *negated {
                    t.not()
                } else {
                    t
                }
            }
            BoolExpr::Between { expr, low, high } => {
                let v = self.eval(expr, scope)?;
                compare(&v, CmpOp::Ge, &self.eval(low, scope)?)
                    .and(compare(&v, CmpOp::Le, &self.eval(high, scope)?))
            }
            BoolExpr::Like { expr, pattern } => {
                let v = self.eval(expr, scope)?;
                let p = self.eval(pattern, scope)?;
                match (v.text_for_like(), p.text_for_like()) {
                    (Some(s), Some(p)) => Truth::from(like(&s, &p)),
                    _ => Truth::Unknown,
                }
            }
            BoolExpr::IsNull { expr, negated } => {
                let null = self.eval(expr, scope)?.is_null();
                Truth::from(null != *negated)
            }
        })
    }
}

fn compare(a: &Val, op: CmpOp, b: &Val) -> Truth {
    if a.is_null() || b.is_null() {
        return Truth::Unknown;
    }
    let ord = a.cmp_sql(b);
    Truth::from(match op {
        CmpOp::Eq => ord.is_eq(),
        CmpOp::NotEq => ord.is_ne(),
        CmpOp::Lt => ord.is_lt(),
        CmpOp::Le => ord.is_le(),
        CmpOp::Gt => ord.is_gt(),
        CmpOp::Ge => ord.is_ge(),
    })
}

/// Case-sensitive LIKE with `%` and `_` over characters.
/// Averages are compared exactly but shown to two decimal places.
fn for_output(e: &Expr, v: Val) -> Val {
    match (e, v) {
        (
            Expr::Aggregate {
                func: AggFunc::Avg, ..
            },
            Val::Num { value, raw: None },
        ) => Val::computed(value.round_dp_with_strategy(2, RoundingStrategy::MidpointAwayFromZero)),
        (_, v) => v,
    }
}

fn like(text: &str, pattern: &str) -> bool {
    let t: Vec<char> = text.chars().collect();
    let p: Vec<char> = pattern.chars().collect();
    // dp over pattern positions reachable after consuming a prefix of t
    let mut cur = vec![false; p.len() + 1];
    cur[0] = true;
    for j in 0..p.len() {
        if p[j] == '%' && cur[j] {
            cur[j + 1] = true;
        }
    }
    for &c in &t {
        let mut next = vec![false; p.len() + 1];
        for j in 0..p.len() {
            if !cur[j] {
                continue;
            }
            match p[j] {
                '%' => next[j] = true,
                '_' => next[j + 1] = true,
                pc if pc == c => next[j + 1] = true,
                _ => {}
            }
        }
        for j in 0..p.len() {
            if p[j] == '%' && next[j] {
                next[j + 1] = true;
            }
        }
        cur = next;
    }
    cur[p.len()]
}

fn row_key(row: &[Val]) -> Vec<ValKey> {
    row.iter().map(Val::key).collect()
}

fn stable_sort(rows: &mut [OutRow], descending: &[bool]) {
    if descending.is_empty() {
        return;
    }
    rows.sort_by(|a, b| {
        for (i, &desc) in descending.iter().enumerate() {
            let ord = a.sort_keys[i].cmp_sql(&b.sort_keys[i]);
            let ord = if desc { ord.reverse() } else { ord };
            if ord.is_ne() {
                return ord;
            }
        }
        std::cmp::Ordering::Equal
    });
}

fn limit(headers: Vec<String>, rows: Vec<OutRow>, n: Option<u64>) -> Relation {
    let take = n.map_or(usize::MAX, |n| usize::try_from(n).unwrap_or(usize::MAX));
    Relation {
        headers,
        rows: rows.into_iter().take(take).map(|r| r.values).collect(),
    }
}

#[cfg(test)]
mod tests;
