//! Runs generated queries through the executor and through SQLite loaded
//! with the same cells, then compares the answers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rusqlite::types::Value;
use rusqlite::Connection;

use tabqa::executor::{execute, ExecError};
use tabqa::lexicon::KeywordLexicon;
use tabqa::sql::{parse, AggArg, AggFunc, BoolExpr, CmpOp, Expr, Ident, QueryAst, SelectItem};
use tabqa::table_store::{Table, TableStore};
use tabqa::template_engine::{bundled_templates, generate_batch, parse_templates};

use crate::common::random_table;

/// Shapes the bundled set does not exercise.
pub const EXTRA_TEMPLATES: &str = r#"
[x_distinct_order]     select distinct c1 from w order by c1
[x_distinct_order_d]   select distinct c1 from w order by c1 desc
[x_distinct_pair]      select distinct c1, c2 from w
[x_is_null]            select c1 from w where c2 is null
[x_not_null_order]     select c1, c2 from w where c3 is not null order by c1 desc, c2
[x_star_eq]            select * from w where c1 = value
[x_star_order]         select * from w order by c1 desc
[x_max_any]            select max(c1) from w | w:table c1:column_any
[x_min_count]          select min(c1), count(c1) from w | w:table c1:column_any
[x_full_aggs]          select avg(c1), sum(c1), count(*) from w
[x_union_top]          select c1 from w union select c2 from w order by c1 desc limit 2
[x_intersect_cols]     select c1 from w intersect select c2 from w
[x_except_cols]        select c1 from w except select c2 from w
[x_union_order]        select c1 from w where c2 = value1 union select c1 from w where c3 = value2 order by c1
[x_not_or]             select c1 from w where not (c2 = value1 or c3 = value2)
[x_like_prefix]        select count(*) from w where c1 like "value%"
[x_like_suffix]        select c1 from w where c2 like "%value"
[x_lt_or_null]         select c1 from w where c2 < number or c2 is null
[x_ne_or_ge]           select count(c1) from w where c2 != value or c3 >= number
[x_in_three]           select c1 from w where c2 in (value1, value2, value3) order by c3 limit 3
[x_having_order]       select c1, count(*) from w group by c1 having count(*) >= number order by c1
[x_group_desc]         select c1, max(c2) from w group by c1 order by c1 desc
[x_group_min_count]    select c1, min(c2), count(c2) from w group by c1
[x_group_where]        select c1, count(*) from w where c2 = value group by c1
[x_group_avg_asc]      select c1, avg(c2) from w group by c1 order by avg(c2) limit 2
[x_between_any]        select c1 from w where c2 between value1 and value2 order by c2 desc
"#;

#[derive(Debug)]
pub struct Outcome {
    pub tables: usize,
    pub queries: usize,
    pub compared: usize,
    /// Our type errors on `sum`/`avg` where SQLite coerces or returns NULL.
    pub excluded: usize,
    pub mismatches: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Cv {
    Null,
    Num(f64),
    Text(String),
}

/// Digits of one script (ASCII, Bengali or Devanagari), an optional sign
/// and an optional fraction, returned as ASCII text.
fn ascii_number(s: &str) -> Option<String> {
    let t = s.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(b) => ("-", b),
        None => ("", t.strip_prefix('+').unwrap_or(t)),
    };
    let mut zero = None;
    let mut out = String::from(sign);
    let (mut int, mut frac, mut point) = (0, 0, false);
    for c in body.chars() {
        if c == '.' {
            if point || int == 0 {
                return None;
            }
            point = true;
            out.push('.');
            continue;
        }
        let z = [0x30u32, 0x09E6, 0x0966]
            .into_iter()
            .find(|z| (*z..*z + 10).contains(&(c as u32)))?;
        if *zero.get_or_insert(z) != z {
            return None;
        }
        out.push(char::from_digit(c as u32 - z, 10).unwrap());
        if point {
            frac += 1;
        } else {
            int += 1;
        }
    }
    (int > 0 && (!point || frac > 0)).then_some(out)
}

fn of_text(raw: &str) -> Cv {
    if raw.trim().is_empty() {
        Cv::Null
    } else if let Some(n) = ascii_number(raw) {
        Cv::Num(n.parse().unwrap())
    } else {
        Cv::Text(raw.to_string())
    }
}

fn of_sqlite(v: Value) -> Cv {
    match v {
        Value::Null => Cv::Null,
        Value::Integer(i) => Cv::Num(i as f64),
        Value::Real(f) => Cv::Num(f),
        Value::Text(s) => Cv::Text(s),
        Value::Blob(b) => Cv::Text(format!("{b:?}")),
    }
}

fn storage(raw: &str) -> Value {
    match of_text(raw) {
        Cv::Null => Value::Null,
        Cv::Num(f) => {
            let ascii = ascii_number(raw).unwrap();
            match ascii.parse::<i64>() {
                Ok(i) if !ascii.contains('.') => Value::Integer(i),
                _ => Value::Real(f),
            }
        }
        Cv::Text(s) => Value::Text(s),
    }
}

fn load(conn: &Connection, name: &str, table: &Table) {
    let n = table.num_columns();
    let cols: Vec<String> = (0..n).flat_map(|i| [format!("c{i}"), format!("r{i}")]).collect();
    conn.execute(&format!("CREATE TABLE {name} ({})", cols.join(", ")), [])
        .unwrap();
    let marks = vec!["?"; 2 * n].join(", ");
    let mut insert = conn
        .prepare(&format!("INSERT INTO {name} VALUES ({marks})"))
        .unwrap();
    for row in table.rows() {
        let values: Vec<Value> = row
            .iter()
            .flat_map(|c| {
                let raw = c.raw();
                let shadow = if raw.trim().is_empty() {
                    Value::Null
                } else {
                    Value::Text(raw.to_string())
                };
                [storage(raw), shadow]
            })
            .collect();
        insert.execute(rusqlite::params_from_iter(values)).unwrap();
    }
}

struct Translator<'a> {
    table: &'a Table,
    name: String,
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

impl Translator<'_> {
    fn column(&self, ident: &Ident) -> Result<usize, String> {
        let h = self.table.headers();
        h.iter()
            .position(|x| x == ident.as_str())
            .or_else(|| {
                let want = tabqa::table_store::normalize_ws(ident.as_str());
                h.iter().position(|x| tabqa::table_store::normalize_ws(x) == want)
            })
            .ok_or_else(|| format!("unbound column {ident}"))
    }

    fn expr(&self, e: &Expr) -> Result<String, String> {
        Ok(match e {
            Expr::Column(c) => format!("c{}", self.column(c)?),
            Expr::Literal(l) => match ascii_number(l.text()) {
                Some(n) => n,
                None => quote(l.text()),
            },
            Expr::Aggregate { func, arg } => {
                let inner = match arg {
                    AggArg::Star => "*".to_string(),
                    AggArg::Column(c) => format!("c{}", self.column(c)?),
                };
                format!("{}({inner})", func.keyword())
            }
        })
    }

    fn cond(&self, b: &BoolExpr) -> Result<String, String> {
        Ok(match b {
            BoolExpr::Compare { left, op, right } => {
                let op = if *op == CmpOp::NotEq { "<>" } else { op.symbol() };
                format!("({} {op} {})", self.expr(left)?, self.expr(right)?)
            }
            BoolExpr::InList { expr, list, negated } => {
                let items: Result<Vec<_>, _> = list.iter().map(|e| self.expr(e)).collect();
                let not = if *negated { "NOT " } else { "" };
                format!("({} {not}IN ({}))", self.expr(expr)?, items?.join(", "))
            }
            BoolExpr::Between { expr, low, high } => {
                format!("({} BETWEEN {} AND {})", self.expr(expr)?, self.expr(low)?, self.expr(high)?)
            }
            BoolExpr::Like { expr, pattern } => {
                // LIKE sees the cell as written, not its numeric value
                let subject = match expr {
                    Expr::Column(c) => format!("r{}", self.column(c)?),
                    other => self.expr(other)?,
                };
                let pattern = match pattern {
                    Expr::Literal(l) => quote(l.text()),
                    other => self.expr(other)?,
                };
                format!("({subject} LIKE {pattern})")
            }
            BoolExpr::IsNull { expr, negated } => {
                let not = if *negated { "NOT " } else { "" };
                format!("({} IS {not}NULL)", self.expr(expr)?)
            }
            BoolExpr::And(a, b) => format!("({} AND {})", self.cond(a)?, self.cond(b)?),
            BoolExpr::Or(a, b) => format!("({} OR {})", self.cond(a)?, self.cond(b)?),
            BoolExpr::Not(a) => format!("(NOT {})", self.cond(a)?),
        })
    }

    /// SELECT ... FROM ... WHERE ... GROUP BY ... HAVING, plus the output
    /// positions holding averages.
    fn core(&self, q: &QueryAst) -> Result<(String, Vec<usize>), String> {
        let mut items = Vec::new();
        let mut avg_cols = Vec::new();
        for item in &q.select_items {
            match item {
                SelectItem::Star => items.extend((0..self.table.num_columns()).map(|i| format!("c{i}"))),
                SelectItem::Expr(e) => {
                    if matches!(e, Expr::Aggregate { func: AggFunc::Avg, .. }) {
                        avg_cols.push(items.len());
                    }
                    items.push(self.expr(e)?);
                }
            }
        }
        let mut sql = format!(
            "SELECT {}{} FROM {}",
            if q.distinct { "DISTINCT " } else { "" },
            items.join(", "),
            self.name
        );
        if let Some(w) = &q.where_clause {
            sql += &format!(" WHERE {}", self.cond(w)?);
        }
        if !q.group_by.is_empty() {
            let keys: Result<Vec<_>, _> = q.group_by.iter().map(|g| self.column(g).map(|i| format!("c{i}"))).collect();
            sql += &format!(" GROUP BY {}", keys?.join(", "));
        }
        if let Some(h) = &q.having {
            sql += &format!(" HAVING {}", self.cond(h)?);
        }
        Ok((sql, avg_cols))
    }

    fn query(&self, q: &QueryAst) -> Result<(String, Vec<usize>), String> {
        let (mut sql, avg_cols) = self.core(q)?;
        let dir = |desc: bool| if desc { " DESC" } else { "" };
        if let Some((op, right)) = &q.set_op {
            if right.set_op.is_some() {
                return Err("chained set operation".into());
            }
            let (rsql, _) = self.core(right)?;
            sql = format!("{sql} {} {rsql}", op.keyword().to_uppercase());
            if !q.order_by.is_empty() {
                let keys: Result<Vec<String>, String> = q
                    .order_by
                    .iter()
                    .map(|o| {
                        let pos = q
                            .select_items
                            .iter()
                            .position(|s| matches!(s, SelectItem::Expr(e) if *e == o.expr))
                            .ok_or("set-op order key is not an output column")?;
                        Ok(format!("{}{}", pos + 1, dir(o.descending())))
                    })
                    .collect();
                sql += &format!(" ORDER BY {}", keys?.join(", "));
            }
        } else if !q.order_by.is_empty() {
            let mut keys = Vec::new();
            for o in &q.order_by {
                keys.push(format!("{}{}", self.expr(&o.expr)?, dir(o.descending())));
            }
            // ties keep source order, groups by their first row
            if !q.distinct {
                keys.push(if q.group_by.is_empty() { "rowid".into() } else { "min(rowid)".into() });
            }
            sql += &format!(" ORDER BY {}", keys.join(", "));
        }
        if let Some(n) = q.limit {
            sql += &format!(" LIMIT {n}");
        }
        Ok((sql, avg_cols))
    }
}

fn num_close(a: f64, b: f64, avg: bool) -> bool {
    let tol = if avg { 0.005 + 1e-9 } else { 1e-9 * a.abs().max(b.abs()).max(1.0) };
    (a - b).abs() <= tol
}

fn rows_match(a: &[Cv], b: &[Cv], avg_cols: &[usize]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).enumerate().all(|(i, pair)| match pair {
            (Cv::Num(x), Cv::Num(y)) => num_close(*x, *y, avg_cols.contains(&i)),
            (x, y) => x == y,
        })
}

fn answers_match(ours: &[Vec<Cv>], theirs: &[Vec<Cv>], ordered: bool, avg_cols: &[usize]) -> bool {
    if ours.len() != theirs.len() {
        return false;
    }
    if ordered {
        return ours.iter().zip(theirs).all(|(a, b)| rows_match(a, b, avg_cols));
    }
    let mut used = vec![false; theirs.len()];
    ours.iter().all(|a| {
        let hit = (0..theirs.len()).find(|&j| !used[j] && rows_match(a, &theirs[j], avg_cols));
        hit.map(|j| used[j] = true).is_some()
    })
}

fn uses_sum_or_avg(q: &QueryAst) -> bool {
    let agg = |e: &Expr| matches!(e, Expr::Aggregate { func: AggFunc::Sum | AggFunc::Avg, .. });
    q.select_items.iter().any(|s| matches!(s, SelectItem::Expr(e) if agg(e)))
        || q.having.iter().flat_map(|h| h.exprs()).any(agg)
        || q.order_by.iter().any(|o| agg(&o.expr))
}

pub fn run(n_tables: usize, quota: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tables: Vec<Table> = (0..n_tables).map(|i| random_table(&mut rng, i)).collect();
    let conn = Connection::open_in_memory().unwrap();
    conn.execute_batch("PRAGMA case_sensitive_like = ON").unwrap();
    let mut names = std::collections::HashMap::new();
    for (i, t) in tables.iter().enumerate() {
        let name = format!("t{i}");
        load(&conn, &name, t);
        names.insert(t.id().to_string(), name);
    }
    let store = TableStore::new(tables);
    let mut templates = bundled_templates();
    templates.extend(parse_templates(EXTRA_TEMPLATES).expect("extra templates parse"));
    let lex = KeywordLexicon::bundled("bn").unwrap();

    let batch = generate_batch(&templates, &store, quota, seed);
    let mut outcome = Outcome {
        tables: store.len(),
        queries: batch.len(),
        compared: 0,
        excluded: 0,
        mismatches: Vec::new(),
    };
    if std::env::var_os("DIFF_COVERAGE").is_some() {
        let mut per: std::collections::BTreeMap<&str, usize> = Default::default();
        for i in &batch { *per.entry(i.template_id.as_str()).or_default() += 1; }
        eprintln!("{per:?}");
    }
    for inst in &batch {
        let table = store.get(&inst.table_id).unwrap();
        let ast = parse(&inst.query_text).expect("generated queries parse");
        let tr = Translator {
            table,
            name: names[&inst.table_id].clone(),
        };
        let fail = |why: String| format!("{} on {}: {why}", inst.query_text, inst.table_id);
        let (sql, avg_cols) = match tr.query(&ast) {
            Ok(x) => x,
            Err(e) => {
                outcome.mismatches.push(fail(e));
                continue;
            }
        };
        let theirs: Result<Vec<Vec<Cv>>, _> = conn.prepare(&sql).and_then(|mut st| {
            let n = st.column_count();
            let rows = st.query_map([], |r| (0..n).map(|i| r.get::<_, Value>(i).map(of_sqlite)).collect())?;
            rows.collect()
        });
        let ours = execute(&ast, table, &lex);
        match (ours, theirs) {
            (Err(ExecError::TypeError(_)), Ok(_)) if uses_sum_or_avg(&ast) => outcome.excluded += 1,
            (Ok(a), Ok(b)) => {
                let a: Vec<Vec<Cv>> = a.rows.iter().map(|r| r.iter().map(|c| of_text(c)).collect()).collect();
                if answers_match(&a, &b, !ast.order_by.is_empty(), &avg_cols) {
                    outcome.compared += 1;
                } else {
                    outcome.mismatches.push(fail(format!("ours {a:?}, sqlite {b:?} via {sql}")));
                }
            }
            (a, b) => outcome.mismatches.push(fail(format!("ours {a:?}, sqlite {b:?} via {sql}"))),
        }
    }
    outcome
}
