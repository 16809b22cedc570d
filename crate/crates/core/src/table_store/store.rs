use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{StoreError, Table};

pub const STORE_MAGIC: &str = "tabqa-store";
const STORE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct StoredTable {
    id: String,
    name: String,
    language: String,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl From<&Table> for StoredTable {
    fn from(t: &Table) -> Self {
        StoredTable {
            id: t.id().to_string(),
            name: t.name().to_string(),
            language: t.language().to_string(),
            headers: t.headers().to_vec(),
            rows: t
                .rows()
                .iter()
                .map(|r| r.iter().map(|c| c.raw().to_string()).collect())
                .collect(),
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Read-only collection of tables keyed and iterated by id.
///
/// File layout: a header line `tabqa-store <version>`, then one line per
/// table `<sha256 of json>\t<json>`, then a trailer `end <count>`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableStore {
    tables: BTreeMap<String, Arc<Table>>,
}

impl TableStore {
    pub fn new(tables: impl IntoIterator<Item = Table>) -> Self {
        let tables = tables
            .into_iter()
            .map(|t| (t.id().to_string(), Arc::new(t)))
            .collect();
        Self { tables }
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Arc<Table>> {
        self.tables.get(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.tables.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<Table>> {
        self.tables.values()
    }

    pub fn persist(&self, path: &Path) -> Result<(), StoreError> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{STORE_MAGIC} {STORE_VERSION}")?;
        for table in self.tables.values() {
            let json = serde_json::to_string(&StoredTable::from(table.as_ref()))
                .map_err(|e| StoreError::CorruptStore(e.to_string()))?;
            writeln!(out, "{}\t{}", sha256_hex(json.as_bytes()), json)?;
        }
        writeln!(out, "end {}", self.tables.len())?;
        out.flush()?;
        Ok(())
    }

    pub fn open(path: &Path) -> Result<Self, StoreError> {
        let reader = BufReader::new(File::open(path)?);
        let mut lines = reader.lines();
        let corrupt = |m: String| StoreError::CorruptStore(format!("{}: {m}", path.display()));

        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| corrupt("empty file".into()))?;
        match header.split_once(' ') {
            Some((STORE_MAGIC, v)) if v == STORE_VERSION.to_string() => {}
            _ => return Err(corrupt(format!("bad header {header:?}"))),
        }

        let mut tables = BTreeMap::new();
        let mut trailer = None;
        for (i, line) in lines.enumerate() {
            let line = line?;
            if trailer.is_some() {
                return Err(corrupt("data after trailer".into()));
            }
            if let Some(count) = line.strip_prefix("end ") {
                trailer = Some(count.parse::<usize>().map_err(|_| corrupt("bad trailer".into()))?);
                continue;
            }
            let (checksum, json) = line
                .split_once('\t')
                .ok_or_else(|| corrupt(format!("entry {} malformed", i + 1)))?;
            if sha256_hex(json.as_bytes()) != checksum {
                return Err(corrupt(format!("checksum mismatch in entry {}", i + 1)));
            }
            let stored: StoredTable = serde_json::from_str(json)
                .map_err(|e| corrupt(format!("entry {}: {e}", i + 1)))?;
            let table = Table::new(stored.name, stored.headers, stored.rows, stored.language)?;
            if table.id() != stored.id {
                return Err(corrupt(format!("id mismatch for {}", stored.id)));
            }
            tables.insert(stored.id, Arc::new(table));
        }
        match trailer {
            Some(n) if n == tables.len() => Ok(Self { tables }),
            Some(n) => Err(corrupt(format!("trailer count {n} != {}", tables.len()))),
            None => Err(corrupt("missing trailer (truncated?)".into())),
        }
    }
}
