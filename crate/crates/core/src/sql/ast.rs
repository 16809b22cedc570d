use std::fmt;

use serde::{Deserialize, Serialize};

/// Identifier as the query names it; binding to a table header happens in
/// the executor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ident(pub String);

impl Ident {
    pub fn new(s: impl Into<String>) -> Self {
        Ident(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Literal {
    /// Unquoted numeric token, kept as written.
    Number(String),
    /// Quoted string, unescaped.
    Str(String),
}

impl Literal {
    pub fn text(&self) -> &str {
        match self {
            Literal::Number(s) | Literal::Str(s) => s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggFunc {
    Count,
    Sum,
    Avg,
    Min,
    Max,
}

impl AggFunc {
    pub fn keyword(self) -> &'static str {
        match self {
            AggFunc::Count => "count",
            AggFunc::Sum => "sum",
            AggFunc::Avg => "avg",
            AggFunc::Min => "min",
            AggFunc::Max => "max",
        }
    }

    /// `sum`, `avg`, `min` and `max` take numeric columns in templates.
    pub fn wants_numeric(self) -> bool {
        !matches!(self, AggFunc::Count)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AggArg {
    Star,
    Column(Ident),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expr {
    Column(Ident),
    Literal(Literal),
    Aggregate { func: AggFunc, arg: AggArg },
}

impl Expr {
    pub fn column(name: &str) -> Self {
        Expr::Column(Ident::new(name))
    }

    pub fn string(s: &str) -> Self {
        Expr::Literal(Literal::Str(s.to_string()))
    }

    pub fn is_aggregate(&self) -> bool {
        matches!(self, Expr::Aggregate { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SelectItem {
    Star,
    Expr(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::NotEq => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::NotEq)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoolExpr {
    Compare {
        left: Expr,
        op: CmpOp,
        right: Expr,
    },
    InList {
        expr: Expr,
        list: Vec<Expr>,
        negated: bool,
    },
    Between {
        expr: Expr,
        low: Expr,
        high: Expr,
    },
    Like {
        expr: Expr,
        pattern: Expr,
    },
    IsNull {
        expr: Expr,
        negated: bool,
    },
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    Not(Box<BoolExpr>),
}

impl BoolExpr {
    /// Every scalar expression appearing in this tree, depth first.
    pub fn exprs(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        self.collect_exprs(&mut out);
        out
    }

    fn collect_exprs<'a>(&'a self, out: &mut Vec<&'a Expr>) {
        match self {
            BoolExpr::Compare { left, right, .. } => out.extend([left, right]),
            BoolExpr::InList { expr, list, .. } => {
                out.push(expr);
                out.extend(list.iter());
            }
            BoolExpr::Between { expr, low, high } => out.extend([expr, low, high]),
            BoolExpr::Like { expr, pattern } => out.extend([expr, pattern]),
            BoolExpr::IsNull { expr, .. } => out.push(expr),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                a.collect_exprs(out);
                b.collect_exprs(out);
            }
            BoolExpr::Not(a) => a.collect_exprs(out),
        }
    }

    /// Visit every node of the tree, parents before children.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a BoolExpr)) {
        f(self);
        match self {
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            BoolExpr::Not(a) => a.walk(f),
            _ => {}
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortDir {
    Asc,
    Desc,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderItem {
    pub expr: Expr,
    /// `None` when the query left the direction implicit (ascending).
    pub dir: Option<SortDir>,
}

impl OrderItem {
    pub fn descending(&self) -> bool {
        self.dir == Some(SortDir::Desc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetOp {
    Union,
    Intersect,
    Except,
}

impl SetOp {
    pub fn keyword(self) -> &'static str {
        match self {
            SetOp::Union => "union",
            SetOp::Intersect => "intersect",
            SetOp::Except => "except",
        }
    }
}

/// A parsed query. When `set_op` is present, the select/from/where/group
/// fields describe the left operand, and `order_by`/`limit` apply to the
/// combined result.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QueryAst {
    pub distinct: bool,
    pub select_items: Vec<SelectItem>,
    pub from: Option<Ident>,
    pub where_clause: Option<BoolExpr>,
    pub group_by: Vec<Ident>,
    pub having: Option<BoolExpr>,
    pub set_op: Option<(SetOp, Box<QueryAst>)>,
    pub order_by: Vec<OrderItem>,
    pub limit: Option<u64>,
}

impl QueryAst {
    pub fn select(items: Vec<SelectItem>) -> Self {
        QueryAst {
            distinct: false,
            select_items: items,
            from: None,
            where_clause: None,
            group_by: Vec::new(),
            having: None,
            set_op: None,
            order_by: Vec::new(),
            limit: None,
        }
    }

    pub fn has_aggregate_select(&self) -> bool {
        self.select_items
            .iter()
            .any(|i| matches!(i, SelectItem::Expr(e) if e.is_aggregate()))
    }

    /// Output width when it is known without a table (no `*`).
    pub fn static_arity(&self) -> Option<usize> {
        if self.select_items.iter().any(|i| matches!(i, SelectItem::Star)) {
            None
        } else {
            Some(self.select_items.len())
        }
    }

    /// The left operand alone: this query without set op, ordering or limit.
    pub fn core(&self) -> QueryAst {
        QueryAst {
            set_op: None,
            order_by: Vec::new(),
            limit: None,
            ..self.clone()
        }
    }

    pub fn is_core(&self) -> bool {
        self.set_op.is_none() && self.order_by.is_empty() && self.limit.is_none()
    }

    /// Every scalar expression of this query and its set-op operands.
    pub fn all_exprs(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        for item in &self.select_items {
            if let SelectItem::Expr(e) = item {
                out.push(e);
            }
        }
        if let Some(w) = &self.where_clause {
            out.extend(w.exprs());
        }
        if let Some(h) = &self.having {
            out.extend(h.exprs());
        }
        out.extend(self.order_by.iter().map(|o| &o.expr));
        if let Some((_, rhs)) = &self.set_op {
            out.extend(rhs.all_exprs());
        }
        out
    }
}
