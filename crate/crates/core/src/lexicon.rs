//! Bidirectional keyword and digit mappings for one language.
//!
//! Lexicons are plain data files so that adding a language needs no code.
//! Each file maps the 27 inventory keywords to fixed localized forms, maps
//! the ten ASCII digits to native digits, and names the sentinel words used
//! by the linearizer.

use std::collections::HashMap;
use std::fs;
use std::ops::RangeInclusive;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::sql::lexer::segments;
use crate::sql::{print_query, PrintOptions, QueryAst, KEYWORD_INVENTORY};
use crate::table_store::digit_value;

const BUNDLED: &[(&str, &str)] = &[
    ("bn", include_str!("../data/lexicons/bn.lex")),
    ("hi", include_str!("../data/lexicons/hi.lex")),
    ("en", include_str!("../data/lexicons/en.lex")),
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("lexicon line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("lexicon line {line}: {keyword:?} is not an inventory keyword")]
    UnknownKeyword { line: usize, keyword: String },
    #[error("lexicon is not a bijection: {0}")]
    NotBijective(String),
    #[error("lexicon digit map incomplete: {0}")]
    Digits(String),
    #[error("no localized form for keyword {0:?}")]
    MissingMapping(String),
    #[error("no bundled lexicon for language {0:?}")]
    UnknownLanguage(String),
    #[error("reading lexicon: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub english: &'static str,
    pub localized: String,
    /// Chosen for this toolkit rather than taken from attested usage.
    pub editorial: bool,
}

#[derive(Debug, Clone)]
pub struct KeywordLexicon {
    language: String,
    entries: Vec<LexiconEntry>,
    to_local: HashMap<&'static str, usize>,
    to_english: HashMap<String, usize>,
    /// Localized forms, longest first, for longest-match scanning.
    by_length: Vec<usize>,
    digits: [char; 10],
    column_word: String,
    row_word: String,
    script: Vec<RangeInclusive<u32>>,
    source_hash: String,
}

impl PartialEq for KeywordLexicon {
    fn eq(&self, other: &Self) -> bool {
        self.language == other.language
            && self.entries == other.entries
            && self.digits == other.digits
            && self.column_word == other.column_word
            && self.row_word == other.row_word
            && self.script == other.script
    }
}

fn parse_script(line: usize, spec: &str) -> Result<Vec<RangeInclusive<u32>>, LexiconError> {
    spec.split(',')
        .map(|part| {
            let (lo, hi) = part.trim().split_once('-').unwrap_or((part.trim(), part.trim()));
            let parse = |s: &str| {
                u32::from_str_radix(s.trim().trim_start_matches("U+"), 16).map_err(|_| {
                    LexiconError::Parse {
                        line,
                        message: format!("bad script range {part:?}"),
                    }
                })
            };
            Ok(parse(lo)?..=parse(hi)?)
        })
        .collect()
}

impl KeywordLexicon {
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut language = None;
        let mut column_word = "column".to_string();
        let mut row_word = "row".to_string();
        let mut script = Vec::new();
        let mut entries: Vec<LexiconEntry> = Vec::new();
        let mut digits: [Option<char>; 10] = [None; 10];

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() < 2 {
                return Err(LexiconError::Parse {
                    line,
                    message: "expected <key>\\t<value>".into(),
                });
            }
            let key = fields[0].trim();
            let value = fields[1].trim();
            if value.is_empty() {
                return Err(LexiconError::Parse {
                    line,
                    message: "empty value".into(),
                });
            }
            if let Some(meta) = key.strip_prefix("meta:") {
                match meta {
                    "lang" => language = Some(value.to_string()),
                    "column" => column_word = value.to_string(),
                    "row" => row_word = value.to_string(),
                    "script" => script = parse_script(line, value)?,
                    other => {
                        return Err(LexiconError::Parse {
                            line,
                            message: format!("unknown meta key {other:?}"),
                        })
                    }
                }
            } else if let Some(d) = key.strip_prefix("digit:") {
                let d: usize = d.parse().ok().filter(|d| *d < 10).ok_or(LexiconError::Parse {
                    line,
                    message: format!("bad digit key {key:?}"),
                })?;
                let mut cs = value.chars();
                let native = match (cs.next(), cs.next()) {
                    (Some(c), None) if digit_value(c).map(|(_, v)| v as usize) == Some(d) => c,
                    _ => {
                        return Err(LexiconError::Digits(format!(
                            "line {line}: {value:?} is not a decimal digit with value {d}"
                        )))
                    }
                };
                if digits[d].replace(native).is_some() {
                    return Err(LexiconError::NotBijective(format!("digit {d} mapped twice")));
                }
            } else {
                let lower = key.to_ascii_lowercase();
                let english = KEYWORD_INVENTORY
                    .iter()
                    .copied()
                    .find(|k| *k == lower)
                    .ok_or_else(|| LexiconError::UnknownKeyword {
                        line,
                        keyword: key.to_string(),
                    })?;
                let editorial = match fields.get(2).map(|f| f.trim()) {
                    None | Some("") => false,
                    Some("editorial") => true,
                    Some(other) => {
                        return Err(LexiconError::Parse {
                            line,
                            message: format!("unknown flag {other:?}"),
                        })
                    }
                };
                entries.push(LexiconEntry {
                    english,
                    localized: value.to_string(),
                    editorial,
                });
            }
        }

        let language = language.ok_or(LexiconError::Parse {
            line: 0,
            message: "missing meta:lang".into(),
        })?;
        let mut native = ['0'; 10];
        for (d, slot) in digits.iter().enumerate() {
            native[d] = slot.ok_or_else(|| LexiconError::Digits(format!("digit {d} missing")))?;
        }
        let mut zeros: Vec<u32> = native.iter().map(|c| digit_value(*c).unwrap().0).collect();
        zeros.dedup();
        if zeros.len() != 1 {
            return Err(LexiconError::Digits("digits mix scripts".into()));
        }

        let mut to_local = HashMap::new();
        let mut to_english = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if to_local.insert(e.english, i).is_some() {
                return Err(LexiconError::NotBijective(format!("{:?} mapped twice", e.english)));
            }
            if to_english.insert(e.localized.clone(), i).is_some() {
                return Err(LexiconError::NotBijective(format!(
                    "{:?} used for two keywords",
                    e.localized
                )));
            }
        }
        let mut by_length: Vec<usize> = (0..entries.len()).collect();
        by_length.sort_by_key(|&i| std::cmp::Reverse(entries[i].localized.len()));
        let source_hash = Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();

        Ok(Self {
            language,
            entries,
            to_local,
            to_english,
            by_length,
            digits: native,
            column_word,
            row_word,
            script,
            source_hash,
        })
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = fs::read_to_string(path).map_err(|e| LexiconError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// One of the lexicons shipped with the crate: `bn`, `hi` or `en`.
    pub fn bundled(language: &str) -> Result<Self, LexiconError> {
        let (_, text) = BUNDLED
            .iter()
            .find(|(l, _)| *l == language)
            .ok_or_else(|| LexiconError::UnknownLanguage(language.to_string()))?;
        Self::parse(text)
    }

    pub fn bundled_languages() -> impl Iterator<Item = &'static str> {
        BUNDLED.iter().map(|(l, _)| *l)
    }

    /// Bundled language tag, or a lexicon file path.
    pub fn resolve(spec: &str) -> Result<Self, LexiconError> {
        if BUNDLED.iter().any(|(l, _)| *l == spec) {
            Self::bundled(spec)
        } else {
            Self::load(Path::new(spec))
        }
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn source_hash(&self) -> &str {
        &self.source_hash
    }

    pub fn localize(&self, english: &str) -> Option<&str> {
        self.to_local
            .get(english)
            .map(|&i| self.entries[i].localized.as_str())
    }

    pub fn english_for(&self, localized: &str) -> Option<&'static str> {
        self.to_english.get(localized).map(|&i| self.entries[i].english)
    }

    pub fn digits(&self) -> &[char; 10] {
        &self.digits
    }

    pub fn is_native_digit(&self, c: char) -> bool {
        self.digits.contains(&c)
    }

    /// Rewrites ASCII digits into this language's digits.
    pub fn localize_digits(&self, ascii: &str) -> String {
        ascii
            .chars()
            .map(|c| match c.to_digit(10) {
                Some(d) if c.is_ascii_digit() => self.digits[d as usize],
                _ => c,
            })
            .collect()
    }

    pub fn column_word(&self) -> &str {
        &self.column_word
    }

    pub fn row_word(&self) -> &str {
        &self.row_word
    }

    pub fn column_sentinel(&self) -> String {
        format!("<{}>", self.column_word)
    }

    /// `<row-word N>` with N in native digits, 1-based.
    pub fn row_sentinel(&self, index: usize) -> String {
        format!("<{} {}>", self.row_word, self.localize_digits(&index.to_string()))
    }

    pub fn in_script(&self, c: char) -> bool {
        let cp = c as u32;
        self.script.iter().any(|r| r.contains(&cp))
    }

    /// Localized forms present in `text` outside quoted regions, as found by
    /// the same scan `remap_keywords` uses.
    pub fn keyword_forms_in<'a>(&'a self, text: &'a str) -> Vec<&'a str> {
        let mut found = Vec::new();
        for seg in segments(text).into_iter().filter(|s| !s.quoted) {
            let part = &text[seg.range.clone()];
            scan_forms(part, self, |_, i| found.push(self.entries[i].localized.as_str()));
        }
        found
    }
}

fn is_word_char(c: char) -> bool {
    if c.is_ascii() {
        return c.is_ascii_alphanumeric() || c == '_';
    }
    !(c.is_whitespace()
        || matches!(c, '\u{0964}' | '\u{0965}' | '\u{2000}'..='\u{206F}' | '\u{3000}'..='\u{303F}'))
}

/// Longest-match scan of `part` for `lex` forms on word boundaries. Calls
/// `hit(byte_offset, entry_index)` for each match; matches never overlap.
fn scan_forms(part: &str, lex: &KeywordLexicon, mut hit: impl FnMut(usize, usize)) {
    let mut pos = 0;
    let mut prev: Option<char> = None;
    while pos < part.len() {
        let rest = &part[pos..];
        let at_boundary = prev.is_none_or(|p| !is_word_char(p));
        if at_boundary {
            let found = lex.by_length.iter().copied().find(|&i| {
                let form = &lex.entries[i].localized;
                rest.starts_with(form.as_str())
                    && rest[form.len()..].chars().next().is_none_or(|n| !is_word_char(n))
            });
            if let Some(i) = found {
                hit(pos, i);
                let len = lex.entries[i].localized.len();
                prev = part[..pos + len].chars().next_back();
                pos += len;
                continue;
            }
        }
        let c = rest.chars().next().unwrap();
        prev = Some(c);
        pos += c.len_utf8();
    }
}

/// Render `ast` as a sentence in the lexicon's language: keywords localized,
/// `from <table>` dropped, identifiers and literals copied verbatim.
pub fn monolingualize(ast: &QueryAst, lex: &KeywordLexicon) -> Result<String, LexiconError> {
    let keyword = |k: &'static str| {
        lex.localize(k)
            .map(str::to_string)
            .ok_or_else(|| LexiconError::MissingMapping(k.to_string()))
    };
    print_query(
        ast,
        &PrintOptions {
            keyword: &keyword,
            omit_from: true,
        },
    )
}

/// Replace `from` localized keyword forms with the `to` forms of the same
/// keyword, outside backtick and double-quoted regions. Forms the target
/// lexicon lacks are left alone.
pub fn remap_keywords(text: &str, from: &KeywordLexicon, to: &KeywordLexicon) -> String {
    let mut out = String::with_capacity(text.len());
    for seg in segments(text) {
        let part = &text[seg.range.clone()];
        if seg.quoted {
            out.push_str(part);
            continue;
        }
        let mut last = 0;
        scan_forms(part, from, |pos, i| {
            let entry = &from.entries[i];
            if let Some(target) = to.localize(entry.english) {
                out.push_str(&part[last..pos]);
                out.push_str(target);
                last = pos + entry.localized.len();
            }
        });
        out.push_str(&part[last..]);
    }
    out
}

/// Replace every `from` digit with the `to` digit of equal value.
pub fn remap_digits(text: &str, from: &KeywordLexicon, to: &KeywordLexicon) -> String {
    text.chars()
        .map(|c| match from.digits.iter().position(|&d| d == c) {
            Some(v) => to.digits[v],
            None => c,
        })
        .collect()
}
