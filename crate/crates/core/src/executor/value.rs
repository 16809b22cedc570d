use std::cmp::Ordering;

use rust_decimal::Decimal;

use crate::lexicon::KeywordLexicon;
use crate::table_store::{parse_number, CellKind, CellValue};

/// A value flowing through evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Val {
    Null,
    /// `raw` is the source text for cells and literals, `None` for computed
    /// aggregates, which render in the lexicon's digits.
    Num { value: Decimal, raw: Option<String> },
    Text(String),
}

/// Hashable identity of a value: numbers compare by value, so `5`, `5.0`
/// and `৫` are one key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValKey {
    Null,
    Num(Decimal),
    Text(String),
}

impl Val {
    pub fn from_cell(cell: &CellValue) -> Self {
        match cell.kind() {
            CellKind::Empty => Val::Null,
            CellKind::Number => Val::Num {
                value: cell.numeric().expect("number cells carry a value"),
                raw: Some(cell.raw().to_string()),
            },
            CellKind::Text => Val::Text(cell.raw().to_string()),
        }
    }

    pub fn computed(value: Decimal) -> Self {
        Val::Num { value, raw: None }
    }

    pub fn number_literal(text: &str) -> Self {
        Self::string_literal(text)
    }

    /// String literals that spell a number are numbers.
    pub fn string_literal(text: &str) -> Self {
        match parse_number(text) {
            Some(value) => Val::Num {
                value,
                raw: Some(text.to_string()),
            },
            None => Val::Text(text.to_string()),
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Val::Null)
    }

    pub fn numeric(&self) -> Option<Decimal> {
        match self {
            Val::Num { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn key(&self) -> ValKey {
        match self {
            Val::Null => ValKey::Null,
            Val::Num { value, .. } => ValKey::Num(value.normalize()),
            Val::Text(s) => ValKey::Text(s.clone()),
        }
    }

    /// Total order: empty < number < text.
    pub fn cmp_sql(&self, other: &Val) -> Ordering {
        fn rank(v: &Val) -> u8 {
            match v {
                Val::Null => 0,
                Val::Num { .. } => 1,
                Val::Text(_) => 2,
            }
        }
        match (self, other) {
            (Val::Num { value: a, .. }, Val::Num { value: b, .. }) => a.cmp(b),
            (Val::Text(a), Val::Text(b)) => a.cmp(b),
            _ => rank(self).cmp(&rank(other)),
        }
    }

    pub fn text_for_like(&self) -> Option<String> {
        match self {
            Val::Null => None,
            Val::Num { raw: Some(r), .. } => Some(r.clone()),
            Val::Num { value, raw: None } => Some(value.normalize().to_string()),
            Val::Text(s) => Some(s.clone()),
        }
    }

    pub fn render(&self, lex: &KeywordLexicon) -> String {
        match self {
            Val::Null => String::new(),
            Val::Num { raw: Some(r), .. } => r.clone(),
            Val::Num { value, raw: None } => lex.localize_digits(&value.normalize().to_string()),
            Val::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl From<bool> for Truth {
    fn from(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}

impl Truth {
    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    pub fn or(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => Truth::Unknown,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }
}
