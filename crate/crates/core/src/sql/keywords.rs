//! The closed keyword inventory of the query subset.
//!
//! 27 surface forms, three of them multi-word (`group by`, `order by`,
//! `not in`). These are the units that keyword counting tallies and that a
//! [`crate::lexicon::KeywordLexicon`] maps to a target language.

use super::lexer::{tokenize, TokenKind};
use super::{parse, ParseError};

pub const KEYWORD_INVENTORY: [&str; 27] = [
    "select",
    "from",
    "where",
    "count",
    "sum",
    "avg",
    "min",
    "max",
    "distinct",
    "and",
    "or",
    "not",
    "in",
    "not in",
    "between",
    "like",
    "is",
    "null",
    "group by",
    "having",
    "order by",
    "asc",
    "desc",
    "limit",
    "union",
    "intersect",
    "except",
];

pub fn is_inventory_keyword(s: &str) -> bool {
    KEYWORD_INVENTORY.contains(&s)
}

/// Single-word lexical keywords. `group`, `order` and `by` only occur inside
/// the multi-word inventory entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Select,
    From,
    Where,
    Count,
    Sum,
    Avg,
    Min,
    Max,
    Distinct,
    And,
    Or,
    Not,
    In,
    Between,
    Like,
    Is,
    Null,
    Group,
    Order,
    By,
    Having,
    Asc,
    Desc,
    Limit,
    Union,
    Intersect,
    Except,
}

impl Keyword {
    const ALL: [Keyword; 27] = [
        Keyword::Select,
        Keyword::From,
        Keyword::Where,
        Keyword::Count,
        Keyword::Sum,
        Keyword::Avg,
        Keyword::Min,
        Keyword::Max,
        Keyword::Distinct,
        Keyword::And,
        Keyword::Or,
        Keyword::Not,
        Keyword::In,
        Keyword::Between,
        Keyword::Like,
        Keyword::Is,
        Keyword::Null,
        Keyword::Group,
        Keyword::Order,
        Keyword::By,
        Keyword::Having,
        Keyword::Asc,
        Keyword::Desc,
        Keyword::Limit,
        Keyword::Union,
        Keyword::Intersect,
        Keyword::Except,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Select => "select",
            Keyword::From => "from",
            Keyword::Where => "where",
            Keyword::Count => "count",
            Keyword::Sum => "sum",
            Keyword::Avg => "avg",
            Keyword::Min => "min",
            Keyword::Max => "max",
            Keyword::Distinct => "distinct",
            Keyword::And => "and",
            Keyword::Or => "or",
            Keyword::Not => "not",
            Keyword::In => "in",
            Keyword::Between => "between",
            Keyword::Like => "like",
            Keyword::Is => "is",
            Keyword::Null => "null",
            Keyword::Group => "group",
            Keyword::Order => "order",
            Keyword::By => "by",
            Keyword::Having => "having",
            Keyword::Asc => "asc",
            Keyword::Desc => "desc",
            Keyword::Limit => "limit",
            Keyword::Union => "union",
            Keyword::Intersect => "intersect",
            Keyword::Except => "except",
        }
    }

    pub fn from_word(word: &str) -> Option<Keyword> {
        if !word.is_ascii() {
            return None;
        }
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.as_str().eq_ignore_ascii_case(word))
    }
}

/// Inventory entries found in `query_text`, in order, outside quoted regions.
/// The query must parse.
pub fn keyword_occurrences(query_text: &str) -> Result<Vec<&'static str>, ParseError> {
    parse(query_text)?;
    let tokens = tokenize(query_text)?;
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if let TokenKind::Keyword(k) = tokens[i].kind {
            let next = tokens.get(i + 1).map(|t| &t.kind);
            let (entry, width) = match (k, next) {
                (Keyword::Group, Some(TokenKind::Keyword(Keyword::By))) => ("group by", 2),
                (Keyword::Order, Some(TokenKind::Keyword(Keyword::By))) => ("order by", 2),
                (Keyword::Not, Some(TokenKind::Keyword(Keyword::In))) => ("not in", 2),
                _ => (k.as_str(), 1),
            };
            if is_inventory_keyword(entry) {
                out.push(entry);
            }
            i += width;
        } else {
            i += 1;
        }
    }
    Ok(out)
}

/// Number of inventory keywords in the query; multi-word keywords count once.
pub fn count_keywords(query_text: &str) -> Result<usize, ParseError> {
    keyword_occurrences(query_text).map(|v| v.len())
}
