//! Flat text encoding of tables with a column sentinel and numbered row
//! sentinels, e.g. `Q <column> h1 | h2 <row 1> a | b <row 2> c | d`.
//!
//! Inside headers and cells every delimiter character and every `<` is
//! doubled, so any run of odd length marks structure. That makes decoding
//! exact for every table, including cells that contain the delimiter, look
//! like sentinels, or are empty.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::executor::AnswerTable;
use crate::lexicon::KeywordLexicon;
use crate::table_store::{parse_number, Table};

pub const DEFAULT_DELIMITER: char = '|';

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("malformed prediction: {reason}")]
pub struct MalformedPrediction {
    pub reason: String,
    /// Whatever could be recovered; rows may be ragged.
    pub salvage: AnswerTable,
}

/// Anything with a header row and string cells.
pub trait Grid {
    fn grid_headers(&self) -> Vec<&str>;
    fn grid_rows(&self) -> Vec<Vec<&str>>;
}

impl Grid for Table {
    fn grid_headers(&self) -> Vec<&str> {
        self.headers().iter().map(String::as_str).collect()
    }

    fn grid_rows(&self) -> Vec<Vec<&str>> {
        self.rows().iter().map(|r| r.iter().map(|c| c.raw()).collect()).collect()
    }
}

impl Grid for AnswerTable {
    fn grid_headers(&self) -> Vec<&str> {
        self.headers.iter().map(String::as_str).collect()
    }

    fn grid_rows(&self) -> Vec<Vec<&str>> {
        self.rows.iter().map(|r| r.iter().map(String::as_str).collect()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Linearizer<'a> {
    lex: &'a KeywordLexicon,
    delimiter: char,
}

impl<'a> Linearizer<'a> {
    pub fn new(lex: &'a KeywordLexicon) -> Self {
        Self {
            lex,
            delimiter: DEFAULT_DELIMITER,
        }
    }

    /// `delimiter` must not be `<` or whitespace.
    pub fn with_delimiter(lex: &'a KeywordLexicon, delimiter: char) -> Self {
        assert!(
            delimiter != '<' && !delimiter.is_whitespace(),
            "unusable delimiter {delimiter:?}"
        );
        Self { lex, delimiter }
    }

    pub fn delimiter(&self) -> char {
        self.delimiter
    }

    fn escape(&self, s: &str, out: &mut String) {
        for c in s.chars() {
            if c == self.delimiter || c == '<' {
                out.push(c);
            }
            out.push(c);
        }
    }

    fn push_cells(&self, cells: &[&str], out: &mut String) {
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                out.push(' ');
                out.push(self.delimiter);
                out.push(' ');
            }
            self.escape(c, out);
        }
    }

    /// Question followed by the linearized table. An empty question yields
    /// just the table, which is the answer-side format.
    pub fn encode(&self, question: &str, table: &impl Grid) -> String {
        let mut out = String::new();
        if !question.is_empty() {
            out.push_str(question);
            out.push(' ');
        }
        out.push_str(&self.lex.column_sentinel());
        out.push(' ');
        self.push_cells(&table.grid_headers(), &mut out);
        for (i, row) in table.grid_rows().iter().enumerate() {
            out.push(' ');
            out.push_str(&self.lex.row_sentinel(i + 1));
            out.push(' ');
            self.push_cells(row, &mut out);
        }
        out
    }

    pub fn encode_answer(&self, table: &impl Grid) -> String {
        self.encode("", table)
    }

    /// Parse linearized text back into a table. Text before the column
    /// sentinel is ignored.
    pub fn decode(&self, text: &str) -> Result<AnswerTable, MalformedPrediction> {
        let sentinels = self.find_sentinels(text);
        let Some(first) = sentinels.iter().position(|s| s.row.is_none()) else {
            return Err(MalformedPrediction {
                reason: "no column sentinel".into(),
                salvage: AnswerTable::default(),
            });
        };
        let sentinels = &sentinels[first..];
        let mut salvage = AnswerTable::default();
        let mut problems: Vec<String> = Vec::new();
        for (k, s) in sentinels.iter().enumerate() {
            let end = sentinels.get(k + 1).map_or(text.len(), |n| n.start);
            let mut body = &text[s.end..end];
            body = body.strip_prefix(' ').unwrap_or_else(|| {
                if !body.is_empty() {
                    problems.push(format!("no space after sentinel at byte {}", s.start));
                }
                body
            });
            if k + 1 < sentinels.len() {
                body = body.strip_suffix(' ').unwrap_or_else(|| {
                    problems.push(format!("no space before sentinel at byte {end}"));
                    body
                });
            }
            let cells = self.split_cells(body);
            match s.row {
                None if k == 0 => salvage.headers = cells,
                None => problems.push(format!("repeated column sentinel at byte {}", s.start)),
                Some(idx) => {
                    let expected = salvage.rows.len() + 1;
                    if idx != expected {
                        problems.push(format!("row sentinel {idx} where {expected} was expected"));
                    }
                    if cells.len() != salvage.headers.len() {
                        problems.push(format!(
                            "row {expected} has {} cells for {} headers",
                            cells.len(),
                            salvage.headers.len()
                        ));
                    }
                    salvage.rows.push(cells);
                }
            }
        }
        match problems.into_iter().next() {
            None => Ok(salvage),
            Some(reason) => Err(MalformedPrediction { reason, salvage }),
        }
    }

    /// Unescaped sentinels in order of appearance.
    fn find_sentinels(&self, text: &str) -> Vec<Sentinel> {
        let bytes = text.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i] != b'<' {
                i += 1;
                continue;
            }
            let run_start = i;
            while i < bytes.len() && bytes[i] == b'<' {
                i += 1;
            }
            if (i - run_start) % 2 == 0 {
                continue;
            }
            let start = i - 1;
            let Some(close) = text[i..].find('>') else {
                continue;
            };
            let inner = &text[i..i + close];
            let row = if inner == self.lex.column_word() {
                Some(None)
            } else {
                inner
                    .strip_prefix(self.lex.row_word())
                    .and_then(|r| r.strip_prefix(' '))
                    .and_then(parse_index)
                    .map(Some)
            };
            if let Some(row) = row {
                out.push(Sentinel {
                    start,
                    end: i + close + 1,
                    row,
                });
                i += close + 1;
            }
        }
        out
    }

    fn split_cells(&self, body: &str) -> Vec<String> {
        let d = self.delimiter;
        let mut cells = Vec::new();
        let mut cur = String::new();
        let mut chars = body.chars().peekable();
        while let Some(c) = chars.next() {
            if c == d || c == '<' {
                let mut run = 1;
                while chars.peek() == Some(&c) {
                    chars.next();
                    run += 1;
                }
                for _ in 0..run / 2 {
                    cur.push(c);
                }
                if run % 2 == 1 {
                    if c == d {
                        cells.push(std::mem::take(&mut cur));
                    } else {
                        // a stray single '<' that did not open a sentinel
                        cur.push(c);
                    }
                }
            } else {
                cur.push(c);
            }
        }
        cells.push(cur);
        let last = cells.len() - 1;
        for (i, cell) in cells.iter_mut().enumerate() {
            if i < last && cell.ends_with(' ') {
                cell.pop();
            }
            if i > 0 && cell.starts_with(' ') {
                cell.remove(0);
            }
        }
        cells
    }
}

struct Sentinel {
    start: usize,
    end: usize,
    /// `None` for the column sentinel.
    row: Option<usize>,
}

fn parse_index(s: &str) -> Option<usize> {
    if s.is_empty() || !s.chars().all(|c| crate::table_store::digit_value(c).is_some()) {
        return None;
    }
    let n = parse_number(s)?;
    usize::try_from(n.mantissa()).ok().filter(|_| n.scale() == 0)
}

pub fn encode_table(table: &impl Grid, question: &str, lex: &KeywordLexicon) -> String {
    Linearizer::new(lex).encode(question, table)
}

pub fn decode_table(text: &str, lex: &KeywordLexicon) -> Result<AnswerTable, MalformedPrediction> {
    Linearizer::new(lex).decode(text)
}
