//! Clean up a Bengali-script prediction made for a Hindi question:
//! digits, then keywords, then an external translator for the rest.

use tabqa::executor::AnswerTable;
use tabqa::lexicon::KeywordLexicon;
use tabqa::postprocessor::{postprocess, residue_audit, script_audit, SubprocessTranslator};

fn main() -> anyhow::Result<()> {
    let bn = KeywordLexicon::bundled("bn")?;
    let hi = KeywordLexicon::bundled("hi")?;
    let pred = AnswerTable::new(
        vec!["গণনা(`शीर्षक`)".into(), "নাম".into()],
        vec![vec!["৪".into(), "রাহুল".into()]],
    );

    let (out, report) = postprocess(&pred, &bn, &hi, None);
    println!("{:?} {:?}", out.headers, out.rows);
    println!("{report:?}; bengali strings left {}, digit/keyword residue {}", script_audit(&out, &bn), residue_audit(&out, &bn));

    // any line-in, line-out program works as a translator; `cat` keeps text as is
    let echo = SubprocessTranslator::new("cat", vec![]);
    let (_, report) = postprocess(&pred, &bn, &hi, Some(&echo));
    println!("with translator: {report:?}");
    Ok(())
}
