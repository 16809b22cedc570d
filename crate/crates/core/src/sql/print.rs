use std::convert::Infallible;

use super::ast::*;

/// Rendering options shared by the canonical printer and monolingualization.
pub struct PrintOptions<'a, E> {
    /// Renders an inventory keyword (e.g. `"group by"`) in the output language.
    pub keyword: &'a dyn Fn(&'static str) -> Result<String, E>,
    /// Drop `from <table>` clauses.
    pub omit_from: bool,
}

/// Canonical form: lowercase keywords, backtick-quoted identifiers,
/// double-quoted strings, single spaces, minimal parentheses, and every
/// set-op operand parenthesized.
pub fn ast_to_canonical(ast: &QueryAst) -> String {
    let identity = |k: &'static str| Ok::<_, Infallible>(k.to_string());
    match print_query(
        ast,
        &PrintOptions {
            keyword: &identity,
            omit_from: false,
        },
    ) {
        Ok(s) => s,
        Err(never) => match never {},
    }
}

pub fn print_query<E>(ast: &QueryAst, opts: &PrintOptions<'_, E>) -> Result<String, E> {
    let mut out = String::new();
    Printer { opts, out: &mut out }.query(ast)?;
    Ok(out)
}

pub fn quote_ident(name: &str) -> String {
    format!("`{}`", name.replace('`', "``"))
}

pub fn quote_string(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

struct Printer<'o, 'a, E> {
    opts: &'o PrintOptions<'a, E>,
    out: &'o mut String,
}

const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_NOT: u8 = 3;
const PREC_ATOM: u8 = 4;

fn precedence(b: &BoolExpr) -> u8 {
    match b {
        BoolExpr::Or(..) => PREC_OR,
        BoolExpr::And(..) => PREC_AND,
        BoolExpr::Not(..) => PREC_NOT,
        _ => PREC_ATOM,
    }
}

impl<E> Printer<'_, '_, E> {
    fn kw(&mut self, k: &'static str) -> Result<(), E> {
        let s = (self.opts.keyword)(k)?;
        self.out.push_str(&s);
        Ok(())
    }

    fn push(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn query(&mut self, q: &QueryAst) -> Result<(), E> {
        if let Some((op, rhs)) = &q.set_op {
            self.push("(");
            self.core(q)?;
            self.push(") ");
            self.kw(op.keyword())?;
            self.push(" (");
            self.query(rhs)?;
            self.push(")");
        } else {
            self.core(q)?;
        }
        if !q.order_by.is_empty() {
            self.push(" ");
            self.kw("order by")?;
            self.push(" ");
            for (i, item) in q.order_by.iter().enumerate() {
                if i > 0 {
                    self.push(", ");
                }
                self.expr(&item.expr)?;
                match item.dir {
                    Some(SortDir::Asc) => {
                        self.push(" ");
                        self.kw("asc")?;
                    }
                    Some(SortDir::Desc) => {
                        self.push(" ");
                        self.kw("desc")?;
                    }
                    None => {}
                }
            }
        }
        if let Some(n) = q.limit {
            self.push(" ");
            self.kw("limit")?;
            self.push(&format!(" {n}"));
        }
        Ok(())
    }

    fn core(&mut self, q: &QueryAst) -> Result<(), E> {
        self.kw("select")?;
        self.push(" ");
        if q.distinct {
            self.kw("distinct")?;
            self.push(" ");
        }
        for (i, item) in q.select_items.iter().enumerate() {
            if i > 0 {
                self.push(", ");
            }
            match item {
                SelectItem::Star => self.push("*"),
                SelectItem::Expr(e) => self.expr(e)?,
            }
        }
        if let (Some(t), false) = (&q.from, self.opts.omit_from) {
            self.push(" ");
            self.kw("from")?;
            self.push(" ");
            self.push(&quote_ident(t.as_str()));
        }
        if let Some(w) = &q.where_clause {
            self.push(" ");
            self.kw("where")?;
            self.push(" ");
            self.bool_expr(w, PREC_OR)?;
        }
        if !q.group_by.is_empty() {
            self.push(" ");
            self.kw("group by")?;
            self.push(" ");
            let cols: Vec<_> = q.group_by.iter().map(|c| quote_ident(c.as_str())).collect();
            self.push(&cols.join(", "));
        }
        if let Some(h) = &q.having {
            self.push(" ");
            self.kw("having")?;
            self.push(" ");
            self.bool_expr(h, PREC_OR)?;
        }
        Ok(())
    }

    fn expr(&mut self, e: &Expr) -> Result<(), E> {
        match e {
            Expr::Column(c) => self.push(&quote_ident(c.as_str())),
            Expr::Literal(Literal::Number(n)) => self.push(n),
            Expr::Literal(Literal::Str(s)) => self.push(&quote_string(s)),
            Expr::Aggregate { func, arg } => {
                self.kw(func.keyword())?;
                self.push("(");
                match arg {
                    AggArg::Star => self.push("*"),
                    AggArg::Column(c) => self.push(&quote_ident(c.as_str())),
                }
                self.push(")");
            }
        }
        Ok(())
    }

    /// Prints `b`, parenthesizing when its precedence is below `min`.
    fn bool_expr(&mut self, b: &BoolExpr, min: u8) -> Result<(), E> {
        let wrap = precedence(b) < min;
        if wrap {
            self.push("(");
        }
        match b {
            BoolExpr::Or(l, r) => {
                self.bool_expr(l, PREC_OR)?;
                self.push(" ");
                self.kw("or")?;
                self.push(" ");
                self.bool_expr(r, PREC_OR + 1)?;
            }
            BoolExpr::And(l, r) => {
                self.bool_expr(l, PREC_AND)?;
                self.push(" ");
                self.kw("and")?;
                self.push(" ");
                self.bool_expr(r, PREC_AND + 1)?;
            }
            BoolExpr::Not(inner) => {
                self.kw("not")?;
                self.push(" ");
                self.bool_expr(inner, PREC_NOT)?;
            }
            BoolExpr::Compare { left, op, right } => {
                self.expr(left)?;
                self.push(&format!(" {} ", op.symbol()));
                self.expr(right)?;
            }
            BoolExpr::InList { expr, list, negated } => {
                self.expr(expr)?;
                self.push(" ");
                self.kw(if *negated { "not in" } else { "in" })?;
                self.push(" (");
                for (i, e) in list.iter().enumerate() {
                    if i > 0 {
                        self.push(", ");
                    }
                    self.expr(e)?;
                }
                self.push(")");
            }
            BoolExpr::Between { expr, low, high } => {
                self.expr(expr)?;
                self.push(" ");
                self.kw("between")?;
                self.push(" ");
                self.expr(low)?;
                self.push(" ");
                self.kw("and")?;
                self.push(" ");
                self.expr(high)?;
            }
            BoolExpr::Like { expr, pattern } => {
                self.expr(expr)?;
                self.push(" ");
                self.kw("like")?;
                self.push(" ");
                self.expr(pattern)?;
            }
            BoolExpr::IsNull { expr, negated } => {
                self.expr(expr)?;
                self.push(" ");
                self.kw("is")?;
                self.push(" ");
                if *negated {
                    self.kw("not")?;
                    self.push(" ");
                }
                self.kw("null")?;
            }
        }
        if wrap {
            self.push(")");
        }
        Ok(())
    }
}
