//! Classify queries by operator class and summarize a generated batch.

use std::path::Path;

use tabqa::analytics::{classify, complexity};
use tabqa::pipeline::{generate, read_dataset, stats, GenerateConfig};
use tabqa::sql::parse;

fn main() -> anyhow::Result<()> {
    for q in [
        "select count(`a`) from w where `b` = 1",
        "select `a` from w where `b` in (1, 2) order by `c` limit 3",
        "select `a` from w union select `b` from w",
    ] {
        println!("{q}\n  classes {:?}, keywords {}", classify(&parse(q)?), complexity(q)?);
    }

    let out = tempfile::tempdir()?;
    let cfg = GenerateConfig {
        tables: Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample_tables"),
        quota: 300,
        output: out.path().to_path_buf(),
        ..Default::default()
    };
    generate(&cfg, None)?;
    let report = stats(&read_dataset(out.path(), None)?, None);
    print!("{}", report.to_csv());
    Ok(())
}
