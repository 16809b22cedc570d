use super::ast::*;
use super::keywords::Keyword;
use super::lexer::{tokenize, Token, TokenKind};
use super::ParseError;
use crate::table_store::parse_number;

/// Parse one query of the supported subset.
///
/// Grammar (keywords case-insensitive):
///
/// ```text
/// query    := operand [setop operand] [order by item {, item}] [limit N]
/// operand  := core | '(' query ')'
/// core     := select [distinct] items [from ident] [where bool]
///             [group by ident {, ident}] [having bool]
/// bool     := and {or and} ; and := not {and not} ; not := [not] atom
/// atom     := '(' bool ')' | expr cmp expr | expr [not] in '(' list ')'
///           | expr between expr and expr | expr like expr | expr is [not] null
/// expr     := ident | literal | agg '(' ('*' | ident) ')'
/// ```
///
/// A parenthesized left operand must be a plain core; longer set-op chains
/// need explicit parentheses around the right operand.
pub fn parse(src: &str) -> Result<QueryAst, ParseError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let q = p.query()?;
    p.expect_eof()?;
    Ok(q)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_at(&self, offset: usize) -> &TokenKind {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn position(&self) -> usize {
        self.tokens[self.pos].span.start
    }

    fn bump(&mut self) -> TokenKind {
        let k = self.tokens[self.pos].kind.clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        k
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError::syntax(self.position(), expected, &self.peek().describe())
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        *self.peek() == TokenKind::Keyword(kw)
    }

    fn eat_kw(&mut self, kw: Keyword) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: Keyword) -> Result<(), ParseError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error(&[kw.as_str()]))
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == kind {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<(), ParseError> {
        if self.eat(&kind) {
            Ok(())
        } else {
            Err(self.error(&[&kind.describe()]))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if *self.peek() == TokenKind::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    fn query(&mut self) -> Result<QueryAst, ParseError> {
        let left_pos = self.position();
        let mut q = if *self.peek() == TokenKind::LParen {
            self.bump();
            let inner = self.query()?;
            self.expect(TokenKind::RParen)?;
            if !inner.is_core() {
                return Err(ParseError::syntax(
                    left_pos,
                    &["select"],
                    "parenthesized compound left operand",
                ));
            }
            inner
        } else {
            self.core()?
        };

        let set_op = match self.peek() {
            TokenKind::Keyword(Keyword::Union) => Some(SetOp::Union),
            TokenKind::Keyword(Keyword::Intersect) => Some(SetOp::Intersect),
            TokenKind::Keyword(Keyword::Except) => Some(SetOp::Except),
            _ => None,
        };
        if let Some(op) = set_op {
            let op_pos = self.position();
            self.bump();
            let rhs = if *self.peek() == TokenKind::LParen {
                self.bump();
                let inner = self.query()?;
                self.expect(TokenKind::RParen)?;
                inner
            } else {
                self.core()?
            };
            if let (Some(l), Some(r)) = (q.static_arity(), rhs.static_arity()) {
                if l != r {
                    return Err(ParseError::ArityMismatch {
                        position: op_pos,
                        left: l,
                        right: r,
                    });
                }
            }
            q.set_op = Some((op, Box::new(rhs)));
        }

        if self.at_kw(Keyword::Order) {
            self.bump();
            self.expect_kw(Keyword::By)?;
            loop {
                let expr = self.expr()?;
                let dir = if self.eat_kw(Keyword::Asc) {
                    Some(SortDir::Asc)
                } else if self.eat_kw(Keyword::Desc) {
                    Some(SortDir::Desc)
                } else {
                    None
                };
                q.order_by.push(OrderItem { expr, dir });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        if self.eat_kw(Keyword::Limit) {
            let pos = self.position();
            match self.bump() {
                TokenKind::Number(raw) => {
                    let n = parse_number(&raw)
                        .filter(|d| d.fract().is_zero() && !d.is_sign_negative())
                        .and_then(|d| u64::try_from(d).ok())
                        .ok_or_else(|| {
                            ParseError::syntax(pos, &["non-negative integer"], &format!("number {raw}"))
                        })?;
                    q.limit = Some(n);
                }
                other => {
                    return Err(ParseError::syntax(pos, &["non-negative integer"], &other.describe()))
                }
            }
        }
        if set_op.is_some() && matches!(self.peek(), TokenKind::Keyword(Keyword::Union | Keyword::Intersect | Keyword::Except)) {
            return Err(self.error(&["order by", "limit", "end of input", "parenthesized operand"]));
        }
        Ok(q)
    }

    fn core(&mut self) -> Result<QueryAst, ParseError> {
        self.expect_kw(Keyword::Select)?;
        let distinct = self.eat_kw(Keyword::Distinct);
        let mut items = Vec::new();
        loop {
            if self.eat(&TokenKind::Star) {
                items.push(SelectItem::Star);
            } else {
                items.push(SelectItem::Expr(self.expr().map_err(|_| {
                    self.error(&["'*'", "identifier", "literal", "aggregate"])
                })?));
            }
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        let mut q = QueryAst::select(items);
        q.distinct = distinct;
        if self.eat_kw(Keyword::From) {
            q.from = Some(self.ident()?);
        }
        if self.eat_kw(Keyword::Where) {
            q.where_clause = Some(self.bool_or()?);
        }
        if self.at_kw(Keyword::Group) {
            self.bump();
            self.expect_kw(Keyword::By)?;
            loop {
                q.group_by.push(self.ident()?);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        if self.at_kw(Keyword::Having) {
            let pos = self.position();
            self.bump();
            if q.group_by.is_empty() && !q.has_aggregate_select() {
                return Err(ParseError::syntax(pos, &["group by"], "having without grouping"));
            }
            q.having = Some(self.bool_or()?);
        }
        Ok(q)
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        match self.peek().clone() {
            TokenKind::Ident { name, .. } => {
                self.bump();
                Ok(Ident(name))
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let func = match self.peek() {
            TokenKind::Keyword(Keyword::Count) => Some(AggFunc::Count),
            TokenKind::Keyword(Keyword::Sum) => Some(AggFunc::Sum),
            TokenKind::Keyword(Keyword::Avg) => Some(AggFunc::Avg),
            TokenKind::Keyword(Keyword::Min) => Some(AggFunc::Min),
            TokenKind::Keyword(Keyword::Max) => Some(AggFunc::Max),
            _ => None,
        };
        if let Some(func) = func {
            self.bump();
            self.expect(TokenKind::LParen)?;
            let arg = if func == AggFunc::Count && self.eat(&TokenKind::Star) {
                AggArg::Star
            } else {
                AggArg::Column(self.ident()?)
            };
            self.expect(TokenKind::RParen)?;
            return Ok(Expr::Aggregate { func, arg });
        }
        match self.peek().clone() {
            TokenKind::Ident { name, .. } => {
                self.bump();
                Ok(Expr::Column(Ident(name)))
            }
            TokenKind::Str(s) => {
                self.bump();
                Ok(Expr::Literal(Literal::Str(s)))
            }
            TokenKind::Number(n) => {
                self.bump();
                Ok(Expr::Literal(Literal::Number(n)))
            }
            _ => Err(self.error(&["identifier", "literal", "aggregate"])),
        }
    }

    fn bool_or(&mut self) -> Result<BoolExpr, ParseError> {
        let mut left = self.bool_and()?;
        while self.eat_kw(Keyword::Or) {
            let right = self.bool_and()?;
            left = BoolExpr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn bool_and(&mut self) -> Result<BoolExpr, ParseError> {
        let mut left = self.bool_not()?;
        while self.eat_kw(Keyword::And) {
            let right = self.bool_not()?;
            left = BoolExpr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn bool_not(&mut self) -> Result<BoolExpr, ParseError> {
        if self.eat_kw(Keyword::Not) {
            return Ok(BoolExpr::Not(Box::new(self.bool_not()?)));
        }
        if *self.peek() == TokenKind::LParen {
            self.bump();
            let inner = self.bool_or()?;
            self.expect(TokenKind::RParen)?;
            return Ok(inner);
        }
        self.predicate()
    }

    fn predicate(&mut self) -> Result<BoolExpr, ParseError> {
        let expr = self.expr()?;
        let op = match self.peek() {
            TokenKind::Eq => Some(CmpOp::Eq),
            TokenKind::NotEq => Some(CmpOp::NotEq),
            TokenKind::Lt => Some(CmpOp::Lt),
            TokenKind::Le => Some(CmpOp::Le),
            TokenKind::Gt => Some(CmpOp::Gt),
            TokenKind::Ge => Some(CmpOp::Ge),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let right = self.expr()?;
            return Ok(BoolExpr::Compare {
                left: expr,
                op,
                right,
            });
        }
        if self.at_kw(Keyword::Not) && *self.peek_at(1) == TokenKind::Keyword(Keyword::In) {
            self.bump();
            self.bump();
            let list = self.expr_list()?;
            return Ok(BoolExpr::InList {
                expr,
                list,
                negated: true,
            });
        }
        if self.eat_kw(Keyword::In) {
            let list = self.expr_list()?;
            return Ok(BoolExpr::InList {
                expr,
                list,
                negated: false,
            });
        }
        if self.eat_kw(Keyword::Between) {
            let low = self.expr()?;
            self.expect_kw(Keyword::And)?;
            let high = self.expr()?;
            return Ok(BoolExpr::Between { expr, low, high });
        }
        if self.eat_kw(Keyword::Like) {
            let pattern = self.expr()?;
            return Ok(BoolExpr::Like { expr, pattern });
        }
        if self.eat_kw(Keyword::Is) {
            let negated = self.eat_kw(Keyword::Not);
            self.expect_kw(Keyword::Null)?;
            return Ok(BoolExpr::IsNull { expr, negated });
        }
        Err(self.error(&["comparison", "in", "not in", "between", "like", "is"]))
    }

    fn expr_list(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect(TokenKind::LParen)?;
        let mut list = vec![self.expr()?];
        while self.eat(&TokenKind::Comma) {
            list.push(self.expr()?);
        }
        self.expect(TokenKind::RParen)?;
        Ok(list)
    }
}
