use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

/// Code points of the digit zero for every script whose decimal digits are
/// accepted in numeric cells. Digits one through nine follow contiguously.
const DIGIT_ZEROS: &[u32] = &[
    0x0030, // ASCII
    0x0660, // Arabic-Indic
    0x06F0, // Extended Arabic-Indic
    0x0966, // Devanagari
    0x09E6, // Bengali
    0x0A66, // Gurmukhi
    0x0AE6, // Gujarati
    0x0B66, // Oriya
    0x0BE6, // Tamil
    0x0C66, // Telugu
    0x0CE6, // Kannada
    0x0D66, // Malayalam
    0x0DE6, // Sinhala Lith
    0x0E50, // Thai
    0x0ED0, // Lao
    0x0F20, // Tibetan
    0x1040, // Myanmar
    0x17E0, // Khmer
    0x1810, // Mongolian
    0xFF10, // Fullwidth
];

/// Returns `(script_zero, value)` when `c` is a decimal digit of a known script.
pub fn digit_value(c: char) -> Option<(u32, u32)> {
    let cp = c as u32;
    DIGIT_ZEROS
        .iter()
        .find(|&&zero| cp >= zero && cp < zero + 10)
        .map(|&zero| (zero, cp - zero))
}

/// Maps every recognised digit to ASCII and leaves everything else alone.
pub fn to_ascii_digits(text: &str) -> String {
    text.chars()
        .map(|c| match digit_value(c) {
            Some((_, v)) => char::from_digit(v, 10).unwrap(),
            None => c,
        })
        .collect()
}

/// Parses a decimal number written in any single supported digit script.
///
/// Accepts an optional sign, at least one integer digit and an optional
/// fractional part. Surrounding whitespace is ignored. Digits from two
/// different scripts in one string are rejected.
pub fn parse_number(text: &str) -> Option<Decimal> {
    let s = text.trim();
    let (negative, body) = match s.chars().next()? {
        '-' => (true, &s[1..]),
        '+' => (false, &s[1..]),
        _ => (false, s),
    };
    let mut script = None;
    let mut ascii = String::with_capacity(body.len() + 1);
    let mut int_digits = 0usize;
    let mut frac_digits = 0usize;
    let mut seen_point = false;
    for c in body.chars() {
        if c == '.' {
            if seen_point || int_digits == 0 {
                return None;
            }
            seen_point = true;
            ascii.push('.');
            continue;
        }
        let (zero, v) = digit_value(c)?;
        match script {
            None => script = Some(zero),
            Some(z) if z != zero => return None,
            _ => {}
        }
        if seen_point {
            frac_digits += 1;
        } else {
            int_digits += 1;
        }
        ascii.push(char::from_digit(v, 10).unwrap());
    }
    if int_digits == 0 || (seen_point && frac_digits == 0) {
        return None;
    }
    let value = Decimal::from_str(&ascii).ok()?;
    Some(if negative { -value } else { value })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    Number,
    Text,
    Empty,
}

/// One table cell. The raw string is kept verbatim; the kind and numeric
/// value are derived from it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellValue {
    raw: String,
    kind: CellKind,
    numeric: Option<Decimal>,
}

impl CellValue {
    pub fn new(raw: impl Into<String>) -> Self {
        let raw = raw.into();
        if raw.trim().is_empty() {
            return Self {
                raw,
                kind: CellKind::Empty,
                numeric: None,
            };
        }
        match parse_number(&raw) {
            Some(n) => Self {
                raw,
                kind: CellKind::Number,
                numeric: Some(n),
            },
            None => Self {
                raw,
                kind: CellKind::Text,
                numeric: None,
            },
        }
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn kind(&self) -> CellKind {
        self.kind
    }

    pub fn numeric(&self) -> Option<Decimal> {
        self.numeric
    }

    pub fn is_empty(&self) -> bool {
        self.kind == CellKind::Empty
    }
}

impl From<&str> for CellValue {
    fn from(s: &str) -> Self {
        CellValue::new(s)
    }
}

impl fmt::Display for CellValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

/// Trim and collapse internal whitespace runs to a single space.
pub fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
