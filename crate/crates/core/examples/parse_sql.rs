//! Parse code-mixed SQL, print it canonically and count its keywords.

use tabqa::sql::{ast_to_canonical, keyword_occurrences, parse};

fn main() -> anyhow::Result<()> {
    let queries = [
        "select count(`Title`) from w where `year` = 2007",
        "SELECT `জেলা` FROM w WHERE `দূরত্ব` BETWEEN ৫ AND ২০ ORDER BY `দূরত্ব` DESC LIMIT 2",
        "select `দল` from w group by `দল` having count(*) > 1",
    ];
    for q in queries {
        let ast = parse(q)?;
        println!("{}", ast_to_canonical(&ast));
        println!("  keywords: {:?}", keyword_occurrences(q)?);
    }
    match parse("select from w") {
        Err(e) => println!("rejected at byte {}: {e}", e.position()),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
