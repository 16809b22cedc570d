use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use super::{StoreError, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Tsv,
    Jsonl,
}

impl TableFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Tsv => "tsv",
            TableFormat::Jsonl => "jsonl",
        }
    }

    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()?.to_str()?.parse().ok()
    }
}

impl FromStr for TableFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "tsv" => Ok(TableFormat::Tsv),
            "jsonl" => Ok(TableFormat::Jsonl),
            other => Err(format!("unknown table format {other:?}")),
        }
    }
}

#[derive(Deserialize)]
struct JsonTable {
    name: String,
    headers: Vec<String>,
    rows: Vec<Vec<serde_json::Value>>,
    #[serde(default)]
    language: Option<String>,
}

fn json_cell(v: serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s,
        serde_json::Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Load every table under `path` (a single file or a directory scanned for
/// files with the format's extension, in sorted order).
///
/// CSV/TSV files hold one table each, named after the file stem; JSONL
/// files hold one table per line. `language` is used unless a JSONL line
/// carries its own.
pub fn load_tables(
    path: &Path,
    format: TableFormat,
    language: &str,
) -> Result<Vec<Table>, StoreError> {
    let files = if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && TableFormat::from_path(p) == Some(format))
            .collect();
        files.sort();
        files
    } else {
        vec![path.to_path_buf()]
    };
    let mut tables = Vec::new();
    for file in files {
        match format {
            TableFormat::Csv => tables.push(load_delimited(&file, b',', language)?),
            TableFormat::Tsv => tables.push(load_delimited(&file, b'\t', language)?),
            TableFormat::Jsonl => tables.extend(load_jsonl(&file, language)?),
        }
    }
    Ok(tables)
}

fn with_path(err: StoreError, path: &Path) -> StoreError {
    match err {
        StoreError::RaggedTable {
            row,
            expected,
            found,
            ..
        } => StoreError::RaggedTable {
            source_path: Some(path.to_path_buf()),
            row,
            expected,
            found,
        },
        other => other,
    }
}

fn load_delimited(path: &Path, delimiter: u8, language: &str) -> Result<Table, StoreError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(delimiter)
        .quoting(delimiter == b',')
        .from_path(path)
        .map_err(|e| format_err(path, e))?;
    let mut records = reader.records();
    let headers: Vec<String> = match records.next() {
        Some(r) => r.map_err(|e| format_err(path, e))?.iter().map(str::to_string).collect(),
        None => {
            return Err(StoreError::Format {
                path: path.to_path_buf(),
                message: "missing header line".into(),
            })
        }
    };
    let mut rows = Vec::new();
    for record in records {
        let record = record.map_err(|e| format_err(path, e))?;
        rows.push(record.iter().map(str::to_string).collect::<Vec<_>>());
    }
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default()
        .to_string();
    Table::new(name, headers, rows, language).map_err(|e| with_path(e, path))
}

fn load_jsonl(path: &Path, language: &str) -> Result<Vec<Table>, StoreError> {
    let reader = BufReader::new(File::open(path)?);
    let mut tables = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: JsonTable = serde_json::from_str(&line).map_err(|e| StoreError::Format {
            path: path.to_path_buf(),
            message: format!("line {}: {e}", lineno + 1),
        })?;
        let rows = raw
            .rows
            .into_iter()
            .map(|r| r.into_iter().map(json_cell).collect::<Vec<_>>())
            .collect::<Vec<_>>();
        let lang = raw.language.unwrap_or_else(|| language.to_string());
        tables.push(Table::new(raw.name, raw.headers, rows, lang).map_err(|e| with_path(e, path))?);
    }
    Ok(tables)
}

fn format_err(path: &Path, e: csv::Error) -> StoreError {
    StoreError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}
