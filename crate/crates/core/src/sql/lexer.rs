use std::ops::Range;

use super::keywords::Keyword;
use super::ParseError;
use crate::table_store::digit_value;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    /// Bare or backtick-quoted identifier, unescaped.
    Ident { name: String, quoted: bool },
    /// Single- or double-quoted string literal, unescaped.
    Str(String),
    /// Numeric literal as written (any single digit script, optional sign).
    Number(String),
    LParen,
    RParen,
    Comma,
    Star,
    Eq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Keyword(k) => k.as_str().to_string(),
            TokenKind::Ident { name, .. } => format!("identifier {name:?}"),
            TokenKind::Str(s) => format!("string {s:?}"),
            TokenKind::Number(n) => format!("number {n}"),
            TokenKind::LParen => "'('".into(),
            TokenKind::RParen => "')'".into(),
            TokenKind::Comma => "','".into(),
            TokenKind::Star => "'*'".into(),
            TokenKind::Eq => "'='".into(),
            TokenKind::NotEq => "'!='".into(),
            TokenKind::Lt => "'<'".into(),
            TokenKind::Le => "'<='".into(),
            TokenKind::Gt => "'>'".into(),
            TokenKind::Ge => "'>='".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte range in the source text.
    pub span: Range<usize>,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || (!c.is_ascii() && !c.is_whitespace())
}

fn is_digit(c: char) -> bool {
    digit_value(c).is_some()
}

/// Tokenize `src`. Keywords are matched ASCII-case-insensitively on bare
/// words only; quoted identifiers and strings are never keywords.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    let peek = |at: usize| src[at..].chars().next();
    while let Some(c) = peek(pos) {
        let start = pos;
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }
        let (kind, end) = match c {
            '(' => (TokenKind::LParen, pos + 1),
            ')' => (TokenKind::RParen, pos + 1),
            ',' => (TokenKind::Comma, pos + 1),
            '*' => (TokenKind::Star, pos + 1),
            '=' => (TokenKind::Eq, pos + 1),
            '!' => match peek(pos + 1) {
                Some('=') => (TokenKind::NotEq, pos + 2),
                _ => return Err(ParseError::syntax(start, &["'!='"], "'!'")),
            },
            '<' => match peek(pos + 1) {
                Some('=') => (TokenKind::Le, pos + 2),
                Some('>') => (TokenKind::NotEq, pos + 2),
                _ => (TokenKind::Lt, pos + 1),
            },
            '>' => match peek(pos + 1) {
                Some('=') => (TokenKind::Ge, pos + 2),
                _ => (TokenKind::Gt, pos + 1),
            },
            '`' | '"' | '\'' => {
                let (text, end) = read_quoted(src, start, c)?;
                let kind = if c == '`' {
                    TokenKind::Ident {
                        name: text,
                        quoted: true,
                    }
                } else {
                    TokenKind::Str(text)
                };
                (kind, end)
            }
            _ if is_digit(c) || ((c == '-' || c == '+') && next_is_digit(src, start + 1)) => {
                let end = scan_number(src, start);
                (TokenKind::Number(src[start..end].to_string()), end)
            }
            _ if is_ident_char(c) => {
                let end = src[start..]
                    .char_indices()
                    .find(|&(_, ch)| !is_ident_char(ch))
                    .map_or(src.len(), |(i, _)| start + i);
                let word = &src[start..end];
                let kind = match Keyword::from_word(word) {
                    Some(k) => TokenKind::Keyword(k),
                    None => TokenKind::Ident {
                        name: word.to_string(),
                        quoted: false,
                    },
                };
                (kind, end)
            }
            other => {
                return Err(ParseError::syntax(
                    start,
                    &["keyword", "identifier", "literal", "operator"],
                    &format!("{other:?}"),
                ))
            }
        };
        tokens.push(Token {
            kind,
            span: start..end,
        });
        pos = end;
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        span: src.len()..src.len(),
    });
    Ok(tokens)
}

fn next_is_digit(src: &str, at: usize) -> bool {
    src[at..].chars().next().is_some_and(is_digit)
}

fn scan_number(src: &str, start: usize) -> usize {
    let mut end = start;
    let mut iter = src[start..].char_indices().peekable();
    if let Some(&(_, c)) = iter.peek() {
        if c == '-' || c == '+' {
            iter.next();
            end = start + 1;
        }
    }
    let mut seen_point = false;
    while let Some(&(i, c)) = iter.peek() {
        if is_digit(c) {
            end = start + i + c.len_utf8();
            iter.next();
        } else if c == '.' && !seen_point && next_is_digit(src, start + i + 1) {
            seen_point = true;
            iter.next();
        } else {
            break;
        }
    }
    end
}

/// Reads a quoted region starting at `start` (the opening quote). A doubled
/// quote character inside the region stands for one literal quote.
fn read_quoted(src: &str, start: usize, quote: char) -> Result<(String, usize), ParseError> {
    let mut out = String::new();
    let body = &src[start + 1..];
    let mut iter = body.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if c == quote {
            if let Some(&(_, next)) = iter.peek() {
                if next == quote {
                    out.push(quote);
                    iter.next();
                    continue;
                }
            }
            return Ok((out, start + 1 + i + 1));
        }
        out.push(c);
    }
    let closing = quote.to_string();
    Err(ParseError::syntax(src.len(), &[&closing], "end of input"))
}

/// A region of free text, tagged by whether it sits inside a quoted
/// identifier or string. Tolerates unterminated quotes (the rest of the
/// text is treated as quoted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub range: Range<usize>,
    pub quoted: bool,
}

pub fn segments(text: &str) -> Vec<Segment> {
    let mut out = Vec::new();
    let mut plain_start = 0;
    let mut i = 0;
    let bytes = text.as_bytes();
    while i < bytes.len() {
        let q = bytes[i];
        if q == b'`' || q == b'"' {
            if plain_start < i {
                out.push(Segment {
                    range: plain_start..i,
                    quoted: false,
                });
            }
            let end = match read_quoted(text, i, q as char) {
                Ok((_, end)) => end,
                Err(_) => text.len(),
            };
            out.push(Segment {
                range: i..end,
                quoted: true,
            });
            i = end;
            plain_start = end;
        } else {
            i += 1;
        }
    }
    if plain_start < text.len() {
        out.push(Segment {
            range: plain_start..text.len(),
            quoted: false,
        });
    }
    out
}
