//! Turn code-mixed SQL into monolingual Bengali and Hindi sentences and
//! move text between the two lexicons.

use tabqa::lexicon::{monolingualize, remap_digits, remap_keywords, KeywordLexicon};
use tabqa::sql::parse;

fn main() -> anyhow::Result<()> {
    let bn = KeywordLexicon::bundled("bn")?;
    let hi = KeywordLexicon::bundled("hi")?;
    let ast = parse("select count(`শিরোনাম`) from w where `বছর` > ২০০৫ and `ভূমিকা` = \"রাহুল\"")?;
    println!("bn: {}", monolingualize(&ast, &bn)?);
    println!("hi: {}", monolingualize(&ast, &hi)?);

    let text = "গণনা(`শিরোনাম`) ১২";
    println!("{text} -> {}", remap_keywords(&remap_digits(text, &bn, &hi), &bn, &hi));
    println!("bn lexicon sha256 {}", bn.source_hash());
    Ok(())
}
