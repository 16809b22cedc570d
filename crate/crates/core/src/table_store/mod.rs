//! Immutable, content-addressed tables and the single-file store that holds them.
//!
//! Tables arrive as CSV/TSV files (first row = headers) or JSONL lines with
//! `{name, headers, rows}`. Every table is validated on the way in: rows must
//! be rectangular, headers non-empty and unique after whitespace
//! normalization. Ids are content hashes, so the same table always gets the
//! same id.

mod cell;
mod load;
mod store;

use std::collections::HashSet;
use std::path::PathBuf;

use sha2::{Digest, Sha256};
use thiserror::Error;

pub use cell::{digit_value, normalize_ws, parse_number, to_ascii_digits, CellKind, CellValue};
pub use load::{load_tables, TableFormat};
pub use store::{TableStore, STORE_MAGIC};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("ragged table{}: row {row} has {found} cells, expected {expected}", source_hint(.source_path))]
    RaggedTable {
        source_path: Option<PathBuf>,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("duplicate header {0:?}")]
    DuplicateHeader(String),
    #[error("empty header at column {0}")]
    EmptyHeader(usize),
    #[error("table has no columns")]
    NoColumns,
    #[error("unknown header {0:?}")]
    UnknownHeader(String),
    #[error("corrupt store: {0}")]
    CorruptStore(String),
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn source_hint(path: &Option<PathBuf>) -> String {
    match path {
        Some(p) => format!(" in {}", p.display()),
        None => String::new(),
    }
}

/// A validated table. Cells keep their raw strings; kinds are derived once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    id: String,
    name: String,
    language: String,
    headers: Vec<String>,
    rows: Vec<Vec<CellValue>>,
    column_kinds: Vec<CellKind>,
}

impl Table {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        headers: Vec<String>,
        rows: Vec<Vec<S>>,
        language: impl Into<String>,
    ) -> Result<Self, StoreError> {
        if headers.is_empty() {
            return Err(StoreError::NoColumns);
        }
        let mut seen = HashSet::new();
        for (i, h) in headers.iter().enumerate() {
            let norm = normalize_ws(h);
            if norm.is_empty() {
                return Err(StoreError::EmptyHeader(i));
            }
            if !seen.insert(norm) {
                return Err(StoreError::DuplicateHeader(h.clone()));
            }
        }
        let width = headers.len();
        let mut cells = Vec::with_capacity(rows.len());
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != width {
                return Err(StoreError::RaggedTable {
                    source_path: None,
                    row: i + 1,
                    expected: width,
                    found: row.len(),
                });
            }
            cells.push(row.into_iter().map(|s| CellValue::new(s)).collect::<Vec<_>>());
        }
        let name = name.into();
        let id = content_id(&name, &headers, &cells);
        let column_kinds = (0..width)
            .map(|j| {
                if cells
                    .iter()
                    .all(|r| matches!(r[j].kind(), CellKind::Number | CellKind::Empty))
                {
                    CellKind::Number
                } else {
                    CellKind::Text
                }
            })
            .collect();
        Ok(Self {
            id,
            name,
            language: language.into(),
            headers,
            rows: cells,
            column_kinds,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn rows(&self) -> &[Vec<CellValue>] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_columns(&self) -> usize {
        self.headers.len()
    }

    /// Column index for `header`: exact match first, then whitespace-normalized.
    pub fn column_index(&self, header: &str) -> Option<usize> {
        if let Some(i) = self.headers.iter().position(|h| h == header) {
            return Some(i);
        }
        let norm = normalize_ws(header);
        self.headers.iter().position(|h| normalize_ws(h) == norm)
    }

    pub fn column_kind(&self, index: usize) -> CellKind {
        self.column_kinds[index]
    }

    pub fn typed_column(&self, header: &str) -> Result<ColumnView<'_>, StoreError> {
        let index = self
            .column_index(header)
            .ok_or_else(|| StoreError::UnknownHeader(header.to_string()))?;
        Ok(ColumnView { table: self, index })
    }

    pub fn columns(&self) -> impl Iterator<Item = ColumnView<'_>> {
        (0..self.headers.len()).map(move |index| ColumnView { table: self, index })
    }
}

/// A single column of a table together with its inferred kind.
#[derive(Debug, Clone, Copy)]
pub struct ColumnView<'a> {
    table: &'a Table,
    index: usize,
}

impl<'a> ColumnView<'a> {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn header(&self) -> &'a str {
        &self.table.headers[self.index]
    }

    /// `Number` iff every non-empty cell parses as a number, else `Text`.
    pub fn kind(&self) -> CellKind {
        self.table.column_kinds[self.index]
    }

    pub fn cells(&self) -> impl Iterator<Item = &'a CellValue> + 'a {
        let index = self.index;
        self.table.rows.iter().map(move |r| &r[index])
    }

    pub fn non_empty_cells(&self) -> impl Iterator<Item = &'a CellValue> + 'a {
        self.cells().filter(|c| !c.is_empty())
    }
}

fn content_id(name: &str, headers: &[String], rows: &[Vec<CellValue>]) -> String {
    let mut hasher = Sha256::new();
    let mut put = |s: &str| {
        hasher.update((s.len() as u64).to_le_bytes());
        hasher.update(s.as_bytes());
    };
    put(name);
    put(&headers.len().to_string());
    for h in headers {
        put(h);
    }
    put(&rows.len().to_string());
    for row in rows {
        for c in row {
            put(c.raw());
        }
    }
    let digest = hasher.finalize();
    digest[..16].iter().map(|b| format!("{b:02x}")).collect()
}
