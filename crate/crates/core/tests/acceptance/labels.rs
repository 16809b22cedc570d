//! Queries labelled by hand with the operator classes they contain.
//! A arithmetic, S sorting, G group by, F filtering, X set op, L logical.

pub const LABELLED: &[(&str, &str)] = &[
    ("select count(*) from w", "A"),
    ("select max(c) from w", "A"),
    ("select count(c) from w where c = \"x\"", "AF"),
    ("select sum(a) from w where b = \"x\"", "AF"),
    ("select avg(a) from w where b = 1", "AF"),
    ("select min(a) from w where b > 2", "AF"),
    ("select a from w where b = \"x\"", "F"),
    ("select a from w where b > 3", "F"),
    ("select a from w where b != \"y\"", "F"),
    ("select a from w order by b", "S"),
    ("select a from w order by b desc", "S"),
    ("select a from w order by b asc limit 1", "S"),
    ("select a from w where b = \"x\" order by c desc limit 1", "FS"),
    ("select a, count(*) from w group by a", "AG"),
    ("select a, sum(b) from w group by a", "AG"),
    ("select a, count(*) from w group by a having count(*) > 2", "AGF"),
    ("select a from w group by a order by count(*) desc limit 1", "AGS"),
    ("select a, avg(b) from w group by a order by avg(b) desc limit 1", "AGS"),
    ("select a from w where b = 1 or b = 2", "FL"),
    ("select a from w where b = 1 and c = 2", "FL"),
    ("select count(*) from w where a in (1, 2)", "AFL"),
    ("select a from w where b not in (1, 2)", "FL"),
    ("select a from w where b between 1 and 5", "FL"),
    ("select a from w where b like \"%x%\"", "FL"),
    ("select a from w where not b = 1", "FL"),
    ("select a from w where b = 1 union select a from w where b = 2", "FX"),
    ("select a from w intersect select b from w", "X"),
    ("select a from w except select a from w where b = 1", "FX"),
    ("select distinct a from w", ""),
    ("select a from w limit 3", ""),
    ("select a from w where b is null", "F"),
    ("select a from w where b is not null order by a", "FS"),
    ("select a, b from w", ""),
    ("select * from w", ""),
    ("select count(*) from w where a = 1 or a = 2 or a = 3", "AFL"),
    ("select a from w where b = 1 and c between 2 and 3 order by c desc limit 1", "FLS"),
    ("select a, count(*) from w group by a having count(*) >= 2 order by count(*) desc limit 1", "AFGS"),
    ("select a, count(*) from w where b = 1 group by a", "AFG"),
    ("select a from w union select b from w order by a desc limit 2", "SX"),
    ("select a, max(b) from w group by a order by a desc", "AGS"),
    ("select count(a) from w where b != 1 or c >= 2", "AFL"),
    ("select a from w where not (b = 1 or c = 2)", "FL"),
    ("select sum(a) from w where b like \"x%\"", "AFL"),
    ("select a from w where b in (1, 2, 3) order by c limit 3", "FLS"),
    ("select a from w group by a", "G"),
    ("select a from w group by a having a = \"x\"", "FG"),
    ("select avg(a), sum(a), count(*) from w", "A"),
    ("select distinct a from w order by a", "S"),
    ("select a from w where b = 1 intersect select a from w where c = 2", "FX"),
    ("select min(a), count(a) from w", "A"),
    ("select a from w where b < 5 or b is null", "FL"),
    ("select a from w where b between 1 and 2 and c like \"%y\"", "FL"),
    ("select count(*) from w where a not in (1)", "AFL"),
    ("select a from w order by b, c desc", "S"),
    ("select a from w where b = \"x\" except select a from w where b between 1 and 2", "FLX"),
    ("select max(a) from w union select min(a) from w", "AX"),
    ("select a from w group by a having count(*) > 1 and sum(b) < 10", "AFGL"),
    ("select b from w where a = \"দল\"", "F"),
    ("select `नाम` from `चुनाव` where `मत` > 10 order by `मत` desc", "FS"),
    ("select count(*) from w group by a order by a", "AGS"),
];
