//! Load the sample CSV tables, inspect column kinds and round-trip a store.

use std::path::Path;

use tabqa::table_store::{load_tables, TableFormat, TableStore};

fn main() -> anyhow::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample_tables");
    let store = TableStore::new(load_tables(&dir, TableFormat::Csv, "bn")?);
    for table in store.iter() {
        let kinds: Vec<String> = table.columns().map(|c| format!("{}:{:?}", c.header(), c.kind())).collect();
        println!("{} ({} rows) {}", table.name(), table.num_rows(), kinds.join(", "));
    }

    let tmp = tempfile::NamedTempFile::new()?;
    store.persist(tmp.path())?;
    assert_eq!(TableStore::open(tmp.path())?, store);
    println!("store with {} tables reopened intact", store.len());
    Ok(())
}
