//! Encode tables as model input/target text and decode them back,
//! including cells that contain the delimiter.

use tabqa::executor::AnswerTable;
use tabqa::lexicon::KeywordLexicon;
use tabqa::linearizer::Linearizer;

fn main() -> anyhow::Result<()> {
    let bn = KeywordLexicon::bundled("bn")?;
    let lin = Linearizer::new(&bn);
    let table = AnswerTable::new(
        vec!["জেলা".into(), "মন্তব্য".into()],
        vec![vec!["বাঁকুড়া".into(), "a | b".into()], vec!["".into(), "<রো ৯>".into()]],
    );
    let text = lin.encode("কতগুলি জেলা?", &table);
    println!("{text}");
    assert_eq!(lin.decode(&text)?, table);

    match lin.decode("<কলাম> a | b <রো ১> 1") {
        Ok(_) => unreachable!(),
        Err(m) => println!("malformed: {}; salvaged {:?}", m.reason, m.salvage.rows),
    }
    Ok(())
}
