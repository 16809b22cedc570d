//! Fill bundled templates from a table and generate a deduplicated batch.

use tabqa::table_store::{Table, TableStore};
use tabqa::template_engine::{bundled_templates, generate_batch, instantiate, parse_templates};

fn main() -> anyhow::Result<()> {
    let table = Table::new(
        "৯ নং রাজ্য সড়ক",
        vec!["জেলা".into(), "দূরত্ব".into()],
        vec![vec!["বাঁকুড়া জেলা", "১২"], vec!["পুরুলিয়া জেলা", "৩০"], vec!["বাঁকুড়া জেলা", "৭"]],
        "bn",
    )?;

    let custom = parse_templates("[top] select c1 from w order by c2 desc limit 1\n")?;
    for seed in 0..3 {
        match instantiate(&custom[0], &table, seed) {
            Ok(inst) => println!("{}  {:?}", inst.query_text, inst.bindings),
            Err(skip) => println!("skipped: {skip}"),
        }
    }

    let templates = bundled_templates();
    let batch = generate_batch(&templates, &TableStore::new([table]), 25, 7);
    println!("{} templates produced {} distinct queries:", templates.len(), batch.len());
    for inst in batch.iter().take(8) {
        println!("  [{}] {}", inst.template_id, inst.query_text);
    }
    Ok(())
}
