//! Frontend for the code-mixed query subset: English keywords, identifiers
//! and literals in any script.

pub mod ast;
pub mod keywords;
pub mod lexer;
mod parser;
mod print;

use thiserror::Error;

pub use ast::*;
pub use keywords::{count_keywords, keyword_occurrences, KEYWORD_INVENTORY};
pub use parser::parse;
pub use print::{ast_to_canonical, print_query, quote_ident, quote_string, PrintOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: expected {}, found {found}", .expected.join(" | "))]
    Syntax {
        position: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("set operation at byte {position} combines {left} columns with {right}")]
    ArityMismatch {
        position: usize,
        left: usize,
        right: usize,
    },
}

impl ParseError {
    pub(crate) fn syntax(position: usize, expected: &[&str], found: &str) -> Self {
        ParseError::Syntax {
            position,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: found.to_string(),
        }
    }

    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. } | ParseError::ArityMismatch { position, .. } => {
                *position
            }
        }
    }
}
