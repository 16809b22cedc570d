//! Generate a sharded dataset from the sample tables, regenerate it from
//! the manifest and check that every record re-executes.

use std::fs;
use std::path::Path;

use tabqa::lexicon::KeywordLexicon;
use tabqa::pipeline::{generate, load_store, read_dataset, reexecutes, GenerateConfig};

fn main() -> anyhow::Result<()> {
    let tables = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample_tables");
    let out = tempfile::tempdir()?;
    let cfg = GenerateConfig::from_toml(&format!(
        "tables = {:?}\nquota = 500\nseed = 11\nshard_size = 100\noutput = {:?}\n",
        tables,
        out.path()
    ))?;
    let first = generate(&cfg, None)?;
    println!("{}", serde_json::to_string_pretty(&first.manifest.gate)?);
    for shard in &first.manifest.shards {
        println!("{} {} records {}", shard.file, shard.records, &shard.sha256[..12]);
    }

    let before = fs::read(out.path().join(&first.manifest.shards[0].file))?;
    generate(&cfg, Some(&first.manifest))?;
    assert_eq!(before, fs::read(out.path().join(&first.manifest.shards[0].file))?);

    let store = load_store(&tables, "csv", "bn")?;
    let lex = KeywordLexicon::bundled("bn")?;
    let records = read_dataset(out.path(), None)?;
    let ok = records.iter().filter(|r| reexecutes(r, &store, &lex)).count();
    println!("{ok}/{} records re-execute to their stored answers", records.len());
    Ok(())
}
