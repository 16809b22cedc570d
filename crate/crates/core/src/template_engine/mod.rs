//! SQL templates with table placeholders, and their instantiation against
//! concrete tables.
//!
//! A template is ordinary query text in which `w` names the table, `c1`..`c9`
//! name columns, `value`/`value1`..`value9` stand for cell values and
//! `number` for a numeric literal. Placeholders parse as identifiers, so a
//! template is checked by the same parser as any query.

mod batch;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hashing::stable_u64;
use crate::sql::lexer::segments;
use crate::sql::{
    ast_to_canonical, parse, AggArg, BoolExpr, Expr, Ident, Literal, QueryAst, SelectItem,
};
use crate::table_store::{CellKind, Table};

pub use batch::generate_batch;

const BUNDLED_TEMPLATES: &str = include_str!("../../data/templates/bundled.sql");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TemplateError {
    #[error("template line {line}: {message}")]
    UnparsableTemplate { line: usize, message: String },
    #[error("template line {line}: unknown placeholder {placeholder:?}")]
    UnknownPlaceholder { line: usize, placeholder: String },
    #[error("reading templates: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotKind {
    Table,
    ColumnAny,
    ColumnNumeric,
    CellLiteral,
    NumericLiteral,
}

impl SlotKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SlotKind::Table => "table",
            SlotKind::ColumnAny => "column_any",
            SlotKind::ColumnNumeric => "column_numeric",
            SlotKind::CellLiteral => "cell_literal",
            SlotKind::NumericLiteral => "numeric_literal",
        }
    }
}

impl FromStr for SlotKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "table" => SlotKind::Table,
            "column_any" => SlotKind::ColumnAny,
            "column_numeric" => SlotKind::ColumnNumeric,
            "cell_literal" => SlotKind::CellLiteral,
            "numeric_literal" => SlotKind::NumericLiteral,
            other => return Err(format!("unknown slot kind {other:?}")),
        })
    }
}

impl fmt::Display for SlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a literal placeholder draws its value from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiteralSource {
    /// Cells of the column bound to this column placeholder.
    Column(String),
    /// A small count compared against an aggregate.
    Aggregate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub placeholder: String,
    pub kind: SlotKind,
    pub source: Option<LiteralSource>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryTemplate {
    pub id: String,
    pub text: String,
    pub slots: Vec<Slot>,
    pub line: usize,
    ast: QueryAst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Placeholder {
    Table,
    Column,
    Value,
    Number,
}

fn classify_placeholder(name: &str) -> Option<Placeholder> {
    let indexed = |prefix: &str| {
        name.strip_prefix(prefix)
            .is_some_and(|d| d.len() == 1 && matches!(d.as_bytes()[0], b'1'..=b'9'))
    };
    match name {
        "w" => Some(Placeholder::Table),
        "value" => Some(Placeholder::Value),
        "number" => Some(Placeholder::Number),
        _ if indexed("c") => Some(Placeholder::Column),
        _ if indexed("value") => Some(Placeholder::Value),
        _ => None,
    }
}

fn compatible(p: Placeholder, kind: SlotKind) -> bool {
    matches!(
        (p, kind),
        (Placeholder::Table, SlotKind::Table)
            | (Placeholder::Column, SlotKind::ColumnAny | SlotKind::ColumnNumeric)
            | (Placeholder::Value, SlotKind::CellLiteral)
            | (Placeholder::Number, SlotKind::NumericLiteral)
    )
}

/// Value placeholders written inside string literals, e.g. `"%value%"`.
fn placeholders_in_string(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let bytes = s.as_bytes();
    let is_word = |b: u8| b.is_ascii_alphanumeric() || b == b'_';
    let mut i = 0;
    while let Some(off) = s[i..].find("value") {
        let start = i + off;
        let mut end = start + 5;
        if end < bytes.len() && matches!(bytes[end], b'1'..=b'9') {
            end += 1;
        }
        let before_ok = start == 0 || !is_word(bytes[start - 1]);
        let after_ok = end == bytes.len() || !is_word(bytes[end]);
        if before_ok && after_ok {
            out.push((start, &s[start..end]));
        }
        i = start + 5;
    }
    out
}

/// Collects placeholder uses and inferred kinds from a template AST.
#[derive(Default)]
struct Scan {
    order: Vec<String>,
    numeric_columns: BTreeSet<String>,
    sources: BTreeMap<String, LiteralSource>,
    errors: Vec<String>,
    unknown: Vec<String>,
}

impl Scan {
    fn note(&mut self, name: &str) {
        match classify_placeholder(name) {
            Some(_) => {
                if !self.order.iter().any(|n| n == name) {
                    self.order.push(name.to_string());
                }
            }
            None => {
                if !self.unknown.iter().any(|n| n == name) {
                    self.unknown.push(name.to_string());
                }
            }
        }
    }

    fn expr(&mut self, e: &Expr) {
        match e {
            Expr::Column(c) => self.note(c.as_str()),
            Expr::Literal(Literal::Str(s)) => {
                for (_, name) in placeholders_in_string(s) {
                    self.note(name);
                }
            }
            Expr::Literal(Literal::Number(_)) => {}
            Expr::Aggregate { func, arg } => {
                if let AggArg::Column(c) = arg {
                    self.note(c.as_str());
                    if func.wants_numeric() {
                        self.numeric_columns.insert(c.to_string());
                    }
                }
            }
        }
    }

    fn column_of(e: &Expr) -> Option<&str> {
        match e {
            Expr::Column(c) if classify_placeholder(c.as_str()) == Some(Placeholder::Column) => {
                Some(c.as_str())
            }
            _ => None,
        }
    }

    fn literal_names(e: &Expr) -> Vec<String> {
        match e {
            Expr::Column(c) => match classify_placeholder(c.as_str()) {
                Some(Placeholder::Value | Placeholder::Number) => vec![c.to_string()],
                _ => Vec::new(),
            },
            Expr::Literal(Literal::Str(s)) => placeholders_in_string(s)
                .into_iter()
                .map(|(_, n)| n.to_string())
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Bind the literal placeholders among `others` to the predicate subject.
    fn bind_literals(&mut self, subject: &Expr, others: &[&Expr]) {
        for other in others {
            for name in Self::literal_names(other) {
                let source = match (Self::column_of(subject), subject) {
                    (Some(c), _) => LiteralSource::Column(c.to_string()),
                    (None, Expr::Aggregate { .. }) if name == "number" => LiteralSource::Aggregate,
                    _ => {
                        self.errors
                            .push(format!("{name} is not compared with a column placeholder"));
                        continue;
                    }
                };
                if source != LiteralSource::Aggregate && name == "number" {
                    if let LiteralSource::Column(c) = &source {
                        self.numeric_columns.insert(c.clone());
                    }
                }
                match self.sources.get(&name) {
                    Some(prev) if prev != &source => self
                        .errors
                        .push(format!("{name} is compared with more than one column")),
                    _ => {
                        self.sources.insert(name, source);
                    }
                }
            }
        }
    }

    fn bool_expr(&mut self, b: &BoolExpr) {
        for e in b.exprs() {
            self.expr(e);
        }
        b.walk(&mut |node| match node {
            BoolExpr::Compare { left, op, right } => {
                let (subject, other) = if Self::literal_names(left).is_empty() {
                    (left, right)
                } else {
                    (right, left)
                };
                if op.is_ordering() {
                    if let Some(c) = Self::column_of(subject) {
                        self.numeric_columns.insert(c.to_string());
                    }
                }
                self.bind_literals(subject, &[other]);
            }
            BoolExpr::InList { expr, list, .. } => {
                let others: Vec<&Expr> = list.iter().collect();
                self.bind_literals(expr, &others);
            }
            BoolExpr::Between { expr, low, high } => {
                if let Some(c) = Self::column_of(expr) {
                    self.numeric_columns.insert(c.to_string());
                }
                self.bind_literals(expr, &[low, high]);
            }
            BoolExpr::Like { expr, pattern } => self.bind_literals(expr, &[pattern]),
            _ => {}
        });
    }

    fn query(&mut self, q: &QueryAst) {
        if let Some(from) = &q.from {
            self.note(from.as_str());
        }
        for item in &q.select_items {
            if let SelectItem::Expr(e) = item {
                self.expr(e);
            }
        }
        if let Some(w) = &q.where_clause {
            self.bool_expr(w);
        }
        for g in &q.group_by {
            self.note(g.as_str());
        }
        if let Some(h) = &q.having {
            self.bool_expr(h);
        }
        for o in &q.order_by {
            self.expr(&o.expr);
        }
        if let Some((_, rhs)) = &q.set_op {
            self.query(rhs);
        }
    }
}

fn check_tables(q: &QueryAst, line: usize) -> Result<(), TemplateError> {
    match &q.from {
        Some(t) if t.as_str() != "w" => {
            return Err(TemplateError::UnparsableTemplate {
                line,
                message: format!("templates address the single table `w`, found `{t}`"),
            })
        }
        _ => {}
    }
    for g in &q.group_by {
        if classify_placeholder(g.as_str()) != Some(Placeholder::Column) {
            return Err(TemplateError::UnknownPlaceholder {
                line,
                placeholder: g.to_string(),
            });
        }
    }
    if let Some((_, rhs)) = &q.set_op {
        check_tables(rhs, line)?;
    }
    Ok(())
}

impl QueryTemplate {
    /// Parse one template line: `[id] query | placeholder:kind ...`, where
    /// both the id and the annotation list are optional.
    pub fn parse_line(line_text: &str, line: usize, default_id: &str) -> Result<Self, TemplateError> {
        let unparsable = |message: String| TemplateError::UnparsableTemplate { line, message };
        let mut rest = line_text.trim();
        let mut id = default_id.to_string();
        if let Some(body) = rest.strip_prefix('[') {
            let close = body
                .find(']')
                .ok_or_else(|| unparsable("unterminated template id".into()))?;
            id = body[..close].trim().to_string();
            if id.is_empty() {
                return Err(unparsable("empty template id".into()));
            }
            rest = body[close + 1..].trim();
        }

        let bar = segments(rest)
            .into_iter()
            .filter(|s| !s.quoted)
            .find_map(|s| rest[s.range.clone()].find('|').map(|i| s.range.start + i));
        let (text, annotations) = match bar {
            Some(i) => (rest[..i].trim(), Some(rest[i + 1..].trim())),
            None => (rest, None),
        };

        let ast = parse(text).map_err(|e| unparsable(e.to_string()))?;
        check_tables(&ast, line)?;
        let mut scan = Scan::default();
        scan.query(&ast);
        if let Some(name) = scan.unknown.first() {
            return Err(TemplateError::UnknownPlaceholder {
                line,
                placeholder: name.clone(),
            });
        }
        if let Some(message) = scan.errors.first() {
            return Err(unparsable(message.clone()));
        }

        let inferred = |name: &str| match classify_placeholder(name).unwrap() {
            Placeholder::Table => SlotKind::Table,
            Placeholder::Column if scan.numeric_columns.contains(name) => SlotKind::ColumnNumeric,
            Placeholder::Column => SlotKind::ColumnAny,
            Placeholder::Value => SlotKind::CellLiteral,
            Placeholder::Number => SlotKind::NumericLiteral,
        };

        let mut slots: Vec<Slot> = Vec::new();
        match annotations {
            Some(list) if !list.is_empty() => {
                for item in list.split_whitespace() {
                    let (name, kind) = item
                        .split_once(':')
                        .ok_or_else(|| unparsable(format!("annotation {item:?} is not name:kind")))?;
                    let kind: SlotKind = kind.parse().map_err(unparsable)?;
                    let p = classify_placeholder(name);
                    if p.is_none() || !scan.order.iter().any(|n| n == name) {
                        return Err(TemplateError::UnknownPlaceholder {
                            line,
                            placeholder: name.to_string(),
                        });
                    }
                    if !compatible(p.unwrap(), kind) {
                        return Err(unparsable(format!("{name} cannot be {kind}")));
                    }
                    if slots.iter().any(|s| s.placeholder == name) {
                        return Err(unparsable(format!("{name} annotated twice")));
                    }
                    slots.push(Slot {
                        placeholder: name.to_string(),
                        kind,
                        source: scan.sources.get(name).cloned(),
                    });
                }
                if let Some(missing) = scan.order.iter().find(|n| !slots.iter().any(|s| &s.placeholder == *n)) {
                    return Err(TemplateError::UnknownPlaceholder {
                        line,
                        placeholder: missing.clone(),
                    });
                }
            }
            _ => {
                for name in &scan.order {
                    slots.push(Slot {
                        placeholder: name.clone(),
                        kind: inferred(name),
                        source: scan.sources.get(name).cloned(),
                    });
                }
            }
        }
        for s in &slots {
            if matches!(s.kind, SlotKind::CellLiteral | SlotKind::NumericLiteral) && s.source.is_none() {
                return Err(unparsable(format!(
                    "{} must be compared with a column or aggregate",
                    s.placeholder
                )));
            }
        }

        Ok(Self {
            id,
            text: text.to_string(),
            slots,
            line,
            ast,
        })
    }

    pub fn slot(&self, placeholder: &str) -> Option<&Slot> {
        self.slots.iter().find(|s| s.placeholder == placeholder)
    }

    pub fn ast(&self) -> &QueryAst {
        &self.ast
    }
}

pub fn parse_templates(text: &str) -> Result<Vec<QueryTemplate>, TemplateError> {
    let mut out: Vec<QueryTemplate> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let default_id = format!("t{:03}", out.len() + 1);
        let t = QueryTemplate::parse_line(trimmed, line, &default_id)?;
        if out.iter().any(|o| o.id == t.id) {
            return Err(TemplateError::UnparsableTemplate {
                line,
                message: format!("duplicate template id {:?}", t.id),
            });
        }
        out.push(t);
    }
    Ok(out)
}

pub fn load_templates(path: &Path) -> Result<Vec<QueryTemplate>, TemplateError> {
    let text = fs::read_to_string(path).map_err(|e| TemplateError::Io(format!("{}: {e}", path.display())))?;
    parse_templates(&text)
}

pub fn bundled_templates() -> Vec<QueryTemplate> {
    parse_templates(BUNDLED_TEMPLATES).expect("bundled templates are valid")
}

pub fn bundled_templates_text() -> &'static str {
    BUNDLED_TEMPLATES
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Instantiation {
    pub template_id: String,
    pub table_id: String,
    pub bindings: BTreeMap<String, String>,
    pub query_text: String,
}

/// Why a template could not be filled from a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skip {
    pub placeholder: String,
}

impl fmt::Display for Skip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no eligible binding for {}", self.placeholder)
    }
}

fn instance_seed(seed: u64, template_id: &str, table_id: &str) -> u64 {
    stable_u64(&[&seed.to_le_bytes(), template_id.as_bytes(), table_id.as_bytes()])
}

fn numeric_cells(table: &Table, col: usize) -> Vec<&str> {
    table
        .rows()
        .iter()
        .filter(|r| r[col].kind() == CellKind::Number)
        .map(|r| r[col].raw())
        .collect()
}

/// Fill `template` from `table`. The same (template, table, seed) always
/// yields the same query.
pub fn instantiate(template: &QueryTemplate, table: &Table, seed: u64) -> Result<Instantiation, Skip> {
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(seed, &template.id, table.id()));
    let mut bindings: BTreeMap<String, String> = BTreeMap::new();
    let mut columns: BTreeMap<String, usize> = BTreeMap::new();
    let skip = |p: &str| Skip {
        placeholder: p.to_string(),
    };

    let mut column_slots: Vec<&Slot> = template
        .slots
        .iter()
        .filter(|s| matches!(s.kind, SlotKind::ColumnAny | SlotKind::ColumnNumeric))
        .collect();
    column_slots.sort_by(|a, b| a.placeholder.cmp(&b.placeholder));
    for slot in column_slots {
        let eligible: Vec<usize> = (0..table.num_columns())
            .filter(|c| !columns.values().any(|used| used == c))
            .filter(|&c| match slot.kind {
                SlotKind::ColumnNumeric => {
                    table.column_kind(c) == CellKind::Number && !numeric_cells(table, c).is_empty()
                }
                _ => true,
            })
            .collect();
        let &c = eligible.choose(&mut rng).ok_or_else(|| skip(&slot.placeholder))?;
        columns.insert(slot.placeholder.clone(), c);
        bindings.insert(slot.placeholder.clone(), table.headers()[c].clone());
    }

    let mut literals: BTreeMap<String, Literal> = BTreeMap::new();
    let mut literal_slots: Vec<&Slot> = template
        .slots
        .iter()
        .filter(|s| matches!(s.kind, SlotKind::CellLiteral | SlotKind::NumericLiteral))
        .collect();
    literal_slots.sort_by(|a, b| a.placeholder.cmp(&b.placeholder));
    for slot in literal_slots {
        let (text, literal) = match (&slot.source, slot.kind) {
            (Some(LiteralSource::Aggregate), _) => {
                let n: u32 = rng.gen_range(1..=3);
                (n.to_string(), Literal::Number(n.to_string()))
            }
            (Some(LiteralSource::Column(c)), kind) => {
                let col = columns[c];
                if kind == SlotKind::NumericLiteral {
                    let cells = numeric_cells(table, col);
                    let raw = cells.choose(&mut rng).ok_or_else(|| skip(&slot.placeholder))?;
                    let ascii = crate::table_store::to_ascii_digits(raw.trim());
                    (ascii.clone(), Literal::Number(ascii))
                } else {
                    let cells: Vec<&crate::table_store::CellValue> = table
                        .rows()
                        .iter()
                        .map(|r| &r[col])
                        .filter(|v| !v.is_empty())
                        .collect();
                    let cell = cells.choose(&mut rng).ok_or_else(|| skip(&slot.placeholder))?;
                    let raw = cell.raw().to_string();
                    let literal = if cell.kind() == CellKind::Number && raw.trim() == raw {
                        Literal::Number(raw.clone())
                    } else {
                        Literal::Str(raw.clone())
                    };
                    (raw, literal)
                }
            }
            (None, _) => return Err(skip(&slot.placeholder)),
        };
        bindings.insert(slot.placeholder.clone(), text);
        literals.insert(slot.placeholder.clone(), literal);
    }
    bindings.insert("w".into(), table.name().to_string());

    let mut ast = template.ast.clone();
    let subst = Subst {
        table: table.name(),
        columns: &columns,
        headers: table.headers(),
        literals: &literals,
        bindings: &bindings,
    };
    subst.query(&mut ast);
    if !template.slots.iter().any(|s| s.kind == SlotKind::Table) {
        bindings.remove("w");
    }
    Ok(Instantiation {
        template_id: template.id.clone(),
        table_id: table.id().to_string(),
        bindings,
        query_text: ast_to_canonical(&ast),
    })
}

struct Subst<'a> {
    table: &'a str,
    columns: &'a BTreeMap<String, usize>,
    headers: &'a [String],
    literals: &'a BTreeMap<String, Literal>,
    bindings: &'a BTreeMap<String, String>,
}

impl Subst<'_> {
    fn ident(&self, id: &mut Ident) {
        if let Some(&c) = self.columns.get(id.as_str()) {
            *id = Ident::new(self.headers[c].clone());
        }
    }

    fn expr(&self, e: &mut Expr) {
        match e {
            Expr::Column(c) => {
                if let Some(lit) = self.literals.get(c.as_str()) {
                    *e = Expr::Literal(lit.clone());
                } else {
                    self.ident(c);
                }
            }
            Expr::Aggregate {
                arg: AggArg::Column(c),
                ..
            } => self.ident(c),
            Expr::Literal(Literal::Str(s)) => {
                let found = placeholders_in_string(s);
                if !found.is_empty() {
                    let mut out = String::new();
                    let mut last = 0;
                    for (pos, name) in found {
                        out.push_str(&s[last..pos]);
                        out.push_str(self.bindings.get(name).map(String::as_str).unwrap_or(name));
                        last = pos + name.len();
                    }
                    out.push_str(&s[last..]);
                    *s = out;
                }
            }
            _ => {}
        }
    }

    fn bool_expr(&self, b: &mut BoolExpr) {
        match b {
            BoolExpr::Compare { left, right, .. } => {
                self.expr(left);
                self.expr(right);
            }
            BoolExpr::InList { expr, list, .. } => {
                self.expr(expr);
                list.iter_mut().for_each(|e| self.expr(e));
            }
            BoolExpr::Between { expr, low, high } => {
                self.expr(expr);
                self.expr(low);
                self.expr(high);
            }
            BoolExpr::Like { expr, pattern } => {
                self.expr(expr);
                self.expr(pattern);
            }
            BoolExpr::IsNull { expr, .. } => self.expr(expr),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                self.bool_expr(a);
                self.bool_expr(b);
            }
            BoolExpr::Not(a) => self.bool_expr(a),
        }
    }

    fn query(&self, q: &mut QueryAst) {
        if q.from.is_some() {
            q.from = Some(Ident::new(self.table));
        }
        for item in &mut q.select_items {
            if let SelectItem::Expr(e) = item {
                self.expr(e);
            }
        }
        if let Some(w) = &mut q.where_clause {
            self.bool_expr(w);
        }
        q.group_by.iter_mut().for_each(|g| self.ident(g));
        if let Some(h) = &mut q.having {
            self.bool_expr(h);
        }
        for o in &mut q.order_by {
            self.expr(&mut o.expr);
        }
        if let Some((_, rhs)) = &mut q.set_op {
            self.query(rhs);
        }
    }
}
