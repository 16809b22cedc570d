//! Execute queries against in-memory tables; results render in the
//! lexicon's digits.

use tabqa::executor::execute;
use tabqa::lexicon::KeywordLexicon;
use tabqa::sql::parse;
use tabqa::table_store::Table;

fn main() -> anyhow::Result<()> {
    let films = Table::new(
        "filmography",
        vec!["year".into(), "Title".into(), "Role".into()],
        vec![
            vec!["2006", "Ek Din", "Rahul"],
            vec!["2007", "Countdown", "Host"],
            vec!["2007", "Ghar", ""],
            vec!["2010", "Antar", "Rahul"],
        ],
        "bn",
    )?;
    let bn = KeywordLexicon::bundled("bn")?;
    let hi = KeywordLexicon::bundled("hi")?;

    for (q, lex) in [
        ("select count(`Title`) from w where `Role` = \"Rahul\" or `year` = 2007", &bn),
        ("select count(`year`) from w", &hi),
        ("select avg(`year`) from w where `Role` is not null", &bn),
        ("select `Role`, count(*) from w group by `Role` order by count(*) desc", &bn),
    ] {
        let answer = execute(&parse(q)?, &films, lex)?;
        println!("{q}\n  {:?} {:?}", answer.headers, answer.rows);
    }

    let err = execute(&parse("select sum(`Title`) from w")?, &films, &bn).unwrap_err();
    println!("sum over text: {err}");
    Ok(())
}
