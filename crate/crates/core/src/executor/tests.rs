use super::*;
use crate::sql::parse;

fn table(headers: &[&str], rows: &[&[&str]]) -> Table {
    Table::new(
        "t",
        headers.iter().map(|h| h.to_string()).collect(),
        rows.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect(),
        "en",
    )
    .unwrap()
}

fn run_with(sql: &str, t: &Table, lang: &str) -> Result<AnswerTable, ExecError> {
    execute(&parse(sql).unwrap(), t, &KeywordLexicon::bundled(lang).unwrap())
}

fn run(sql: &str, t: &Table) -> AnswerTable {
    run_with(sql, t, "en").unwrap()
}

fn col(a: &AnswerTable) -> Vec<&str> {
    a.rows.iter().map(|r| r[0].as_str()).collect()
}

fn filmography() -> Table {
    let rows: Vec<[&str; 3]> = vec![
        ["2006", "Ek Din", "Rahul"],
        ["2007", "Countdown", "Host"],
        ["2008", "Countdown", "Host"],
        ["2008", "Aakash", "Vikram"],
        ["2009", "Countdown", "Host"],
        ["2009", "Mohona", "Amit"],
        ["2010", "Shibaji", "Shibaji"],
        ["2010", "Dui Prithibi", "Raj"],
        ["2011", "Bolo Na Tumi Aamar", "Rohit"],
        ["2011", "Paglu", "Rony"],
        ["2012", "Khokababu", "Khoka"],
        ["2012", "Awara", "Raja"],
        ["2013", "Khiladi", "Ajay"],
        ["2013", "Rangbaaz", "Raja"],
        ["2014", "Bindaas", "Abhi"],
    ];
    let rows: Vec<&[&str]> = rows.iter().map(|r| &r[..]).collect();
    table(&["year", "Title", "Role"], &rows)
}

#[test]
fn count_title_over_filmography() {
    let t = filmography();
    assert_eq!(t.num_rows(), 15);
    let a = run("select count(Title) from w where Title = \"Countdown\"", &t);
    assert_eq!(a.headers, vec!["count(`Title`)"]);
    assert_eq!(a.rows, vec![vec!["3"]]);
}

#[test]
fn hindi_count_renders_native_digits_and_header() {
    let rows: Vec<[&str; 2]> = vec![
        ["2005", "क"],
        ["2011", "ख"],
        ["2011", "ग"],
        ["2009", "घ"],
        ["2011", "ङ"],
        ["2011", "च"],
        ["2014", "छ"],
    ];
    let rows: Vec<&[&str]> = rows.iter().map(|r| &r[..]).collect();
    let t = table(&["वर्ष", "शीर्षक"], &rows);
    let a = run_with("select count(`वर्ष`) from w where `वर्ष` = 2011", &t, "hi").unwrap();
    assert_eq!(a.headers, vec!["गणना(`वर्ष`)"]);
    assert_eq!(a.rows, vec![vec!["४"]]);
    let b = run_with("select count(`शीर्षक`) from w where `वर्ष` = 2011", &t, "bn").unwrap();
    assert_eq!(b.headers, vec!["গণনা(`शीर्षक`)"]);
    assert_eq!(b.rows, vec![vec!["৪"]]);
}

#[test]
fn personnel_or_filter() {
    let t = table(
        &["Position", "Name"],
        &[
            &["Manager", "Neil Warnock"],
            &["Assistant Manager", "Kevin Blackwell"],
            &["Futsal Coordinator", "Michael Skubala"],
            &["First Team Coach", "Ronnie Jepson"],
            &["Goalkeeping Coach", "Andy Leaning"],
            &["Technical Director", "Les Reed"],
            &["Head of Recruitment", "Mick Wadsworth"],
            &["Physiotherapist", "Dave Galley"],
            &["Kit Manager", "John Hosker"],
            &["Chief Scout", "Paul Lake"],
        ],
    );
    let a = run(
        "select Name from w where Position = \"Futsal Coordinator\" or Position = \"Technical Director\"",
        &t,
    );
    assert_eq!(a.headers, vec!["Name"]);
    assert_eq!(col(&a), vec!["Michael Skubala", "Les Reed"]);
}

#[test]
fn empty_table_count_star_is_zero() {
    let t = table(&["a"], &[]);
    assert_eq!(run("select count(*) from w", &t).rows, vec![vec!["0"]]);
    assert_eq!(run("select max(a) from w", &t).rows, vec![vec![""]]);
    assert!(run("select a, count(*) from w group by a", &t).rows.is_empty());
}

#[test]
fn group_order_limit_picks_most_frequent() {
    let t = table(
        &["year", "recipient"],
        &[
            &["2001", "Sitanshu Yashaschandra"],
            &["2002", "Vinod Bhatt"],
            &["2003", "Dhiruben Patel"],
            &["2004", "Vinod Bhatt"],
            &["2005", "Raghuveer Chaudhari"],
            &["2006", "Vinod Bhatt"],
            &["2007", "Dhiruben Patel"],
        ],
    );
    let a = run(
        "select recipient from w group by recipient order by count(*) desc limit 1",
        &t,
    );
    assert_eq!(a.rows, vec![vec!["Vinod Bhatt"]]);
}

#[test]
fn errors() {
    let t = table(&["name", "n"], &[&["x", "1"], &["y", ""]]);
    let e = |sql: &str| run_with(sql, &t, "en").unwrap_err();
    assert_eq!(e("select nope from w"), ExecError::UnknownColumn("nope".into()));
    assert!(matches!(e("select sum(name) from w"), ExecError::TypeError(_)));
    assert!(matches!(e("select avg(n) from w where n is null"), ExecError::TypeError(_)));
    assert!(matches!(e("select name, count(*) from w"), ExecError::TypeError(_)));
    assert!(matches!(e("select name from w group by n"), ExecError::TypeError(_)));
    // unknown columns are reported even when no row would reach them
    assert_eq!(
        e("select name from w where name = \"zzz\" and ghost = 1"),
        ExecError::UnknownColumn("ghost".into())
    );
    assert_eq!(run("select sum(n) from w where n is null", &t).rows, vec![vec![""]]);
}

#[test]
fn numbers_compare_by_value_across_scripts() {
    let t = table(&["v"], &[&["৫"], &["5.0"], &["12"], &["x"], &[""]]);
    assert_eq!(col(&run("select v from w where v = 5", &t)), vec!["৫", "5.0"]);
    assert_eq!(col(&run("select v from w where v > 6", &t)), vec!["12", "x"]);
    assert_eq!(col(&run("select distinct v from w", &t)), vec!["৫", "12", "x", ""]);
    assert_eq!(col(&run("select v from w order by v", &t)), vec!["", "৫", "5.0", "12", "x"]);
    assert_eq!(col(&run("select v from w order by v desc", &t)), vec!["x", "12", "৫", "5.0", ""]);
    assert_eq!(col(&run("select min(v) from w", &t)), vec!["৫"]);
    assert_eq!(col(&run("select max(v) from w", &t)), vec!["x"]);
    assert_eq!(col(&run("select count(v) from w", &t)), vec!["4"]);
}

#[test]
fn empty_cells_are_unknown_in_predicates() {
    let t = table(&["a", "b"], &[&["1", ""], &["2", "x"], &["3", "y"]]);
    assert_eq!(col(&run("select a from w where b != \"x\"", &t)), vec!["3"]);
    assert_eq!(col(&run("select a from w where not b = \"x\"", &t)), vec!["3"]);
    assert_eq!(col(&run("select a from w where b not in (\"x\")", &t)), vec!["3"]);
    assert_eq!(col(&run("select a from w where b is null", &t)), vec!["1"]);
    assert_eq!(col(&run("select a from w where b is not null or a = 1", &t)), vec!["1", "2", "3"]);
}

#[test]
fn between_and_like() {
    let t = table(&["n", "s"], &[&["1", "apple"], &["5", "Apple"], &["9", "grape"]]);
    assert_eq!(col(&run("select n from w where n between 2 and 9", &t)), vec!["5", "9"]);
    assert_eq!(col(&run("select s from w where s like \"%pp%\"", &t)), vec!["apple", "Apple"]);
    assert_eq!(col(&run("select s from w where s like \"a%\"", &t)), vec!["apple"]);
    assert_eq!(col(&run("select s from w where s like \"_rap_\"", &t)), vec!["grape"]);
    assert_eq!(col(&run("select n from w where n like \"9\"", &t)), vec!["9"]);
}

#[test]
fn like_matcher() {
    assert!(like("", ""));
    assert!(like("", "%"));
    assert!(!like("", "_"));
    assert!(like("বাঁকুড়া", "বাঁ%"));
    assert!(like("abc", "%%c"));
    assert!(!like("abc", "a_"));
    assert!(like("a%c", "a%c"));
}

#[test]
fn aggregates_render_exact_and_rounded() {
    let t = table(&["g", "x"], &[&["a", "1.50"], &["a", "2.50"], &["b", "1"], &["b", "2"], &["b", "2"]]);
    let a = run("select g, sum(x), avg(x) from w group by g", &t);
    assert_eq!(a.headers, vec!["g", "sum(`x`)", "avg(`x`)"]);
    assert_eq!(a.rows, vec![vec!["a", "4", "2"], vec!["b", "5", "1.67"]]);
    let bn = run_with("select avg(x) from w where g = \"a\" or x = 1", &t, "bn").unwrap();
    assert_eq!(bn.rows, vec![vec!["১.৬৭"]]);
}

#[test]
fn averages_compare_unrounded() {
    // b averages 1.666..., shown as 1.67 but still below 1.67 and above c's 1.665
    let t = table(
        &["g", "x"],
        &[&["b", "1"], &["b", "2"], &["b", "2"], &["c", "1.665"], &["d", "1.67"]],
    );
    let a = run("select g, avg(x) from w group by g having avg(x) < 1.67", &t);
    assert_eq!(a.rows, vec![vec!["b", "1.67"], vec!["c", "1.67"]]);
    let top = run("select g from w group by g order by avg(x) desc limit 2", &t);
    assert_eq!(col(&top), vec!["d", "b"]);
}

#[test]
fn having_filters_groups() {
    let t = table(&["k"], &[&["a"], &["b"], &["a"], &["c"], &["a"], &["b"]]);
    let a = run("select k, count(*) from w group by k having count(*) >= 2", &t);
    assert_eq!(a.rows, vec![vec!["a", "3"], vec!["b", "2"]]);
    let b = run("select count(*) from w having count(*) > 10", &t);
    assert!(b.rows.is_empty());
}

#[test]
fn order_is_stable_on_ties() {
    let t = table(&["k", "v"], &[&["1", "b"], &["2", "a"], &["1", "c"], &["2", "d"]]);
    assert_eq!(col(&run("select v from w order by k", &t)), vec!["b", "c", "a", "d"]);
    assert_eq!(col(&run("select v from w order by k desc", &t)), vec!["a", "d", "b", "c"]);
    assert_eq!(col(&run("select v from w order by k desc, v desc limit 3", &t)), vec!["d", "a", "c"]);
}

#[test]
fn set_operations_deduplicate() {
    let t = table(&["k", "g"], &[&["a", "1"], &["b", "1"], &["a", "2"], &["c", "2"], &["a", "1"]]);
    let u = run("select k from w where g = 1 union select k from w where g = 2", &t);
    assert_eq!(u.headers, vec!["k"]);
    assert_eq!(col(&u), vec!["a", "b", "c"]);
    let i = run("select k from w where g = 1 intersect select k from w where g = 2", &t);
    assert_eq!(col(&i), vec!["a"]);
    let e = run("select k from w where g = 1 except select k from w where g = 2", &t);
    assert_eq!(col(&e), vec!["b"]);
    let o = run("select k from w union select k from w order by k desc limit 2", &t);
    assert_eq!(col(&o), vec!["c", "b"]);
    let arity = run_with("select k from w union select * from w", &t, "en");
    assert!(matches!(arity, Err(ExecError::TypeError(_))));
}

#[test]
fn select_star_and_literals() {
    let t = table(&["a", "b"], &[&["1", "x"]]);
    let a = run("select * from w", &t);
    assert_eq!(a.headers, vec!["a", "b"]);
    assert_eq!(a.rows, vec![vec!["1", "x"]]);
    let c = run("select count(*) from w", &t);
    assert_eq!(c.headers, vec!["count(*)"]);
}

#[test]
fn headers_bind_whitespace_normalized() {
    let t = table(&["Home  team"], &[&["x"]]);
    let a = run("select `Home team` from w", &t);
    assert_eq!(a.headers, vec!["Home  team"]);
}

#[test]
fn filter_commutes_with_conjunction() {
    let t = filmography();
    let both = run("select Title from w where year > 2008 and Role = \"Host\"", &t);
    let first = run("select Title, Role from w where year > 2008", &t);
    let seq: Vec<&str> = first
        .rows
        .iter()
        .filter(|r| r[1] == "Host")
        .map(|r| r[0].as_str())
        .collect();
    assert_eq!(col(&both), seq);
}
