//! Draw a class-stratified annotation worksheet from unseen tables and
//! average the ratings of a filled sheet.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use tabqa::pipeline::{annotation_sheet, generate, import_annotations, read_dataset, write_sheet, GenerateConfig, SplitRatios};

fn main() -> anyhow::Result<()> {
    let out = tempfile::tempdir()?;
    let cfg = GenerateConfig {
        tables: Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample_tables"),
        quota: 400,
        split_by_table: false,
        splits: SplitRatios {
            train: 0.0,
            validation: 0.0,
            test: 1.0,
        },
        output: out.path().join("ds"),
        ..Default::default()
    };
    generate(&cfg, None)?;
    let records = read_dataset(&cfg.output, None)?;
    let rows = annotation_sheet(&records, &HashSet::new(), 12, 3)?;
    let sheet = out.path().join("sheet.csv");
    write_sheet(&sheet, &rows)?;
    println!("{}", fs::read_to_string(&sheet)?.lines().take(4).collect::<Vec<_>>().join("\n"));

    let filled = out.path().join("filled.csv");
    fs::write(&filled, "id,annotator_question,rating_1,rating_2\na,কতগুলি?,4,5\nb,কে?,4,4\n")?;
    println!("{:?}", import_annotations(&filled)?);
    Ok(())
}
