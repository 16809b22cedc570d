#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tabqa::table_store::Table;

pub const BN_DIGITS: [char; 10] = ['০', '১', '২', '৩', '৪', '৫', '৬', '৭', '৮', '৯'];
pub const HI_DIGITS: [char; 10] = ['०', '१', '२', '३', '४', '५', '६', '७', '८', '९'];

const BN_HEADERS: &[&str] = &["জেলা", "শহর", "দূরত্ব", "বছর", "নাম", "দল", "ভোট", "স্থান", "রাজ্য সড়ক"];
const HI_HEADERS: &[&str] = &["वर्ष", "नाम", "दल", "मत", "शहर", "जिला", "दूरी", "भूमिका", "कुल मत"];
const EN_HEADERS: &[&str] = &["year", "Title", "Role", "Score", "City", "Team", "Votes", "Notes", "Film name"];

const BN_WORDS: &[&str] = &["কলকাতা", "বাঁকুড়া", "হাওড়া", "নদিয়া", "সবুজ দল", "লাল", "ঢাকা", "খুলনা"];
const HI_WORDS: &[&str] = &["दिल्ली", "पटना", "भोपाल", "कांग्रेस", "भाजपा", "निर्दलीय", "जयपुर"];
const EN_WORDS: &[&str] = &["Delhi", "delhi", "Kolkata", "Actor", "Singer", "Lead role", "Guest", "N/A", "a_b", "x%y"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Script {
    Bengali,
    Devanagari,
    Latin,
}

impl Script {
    pub fn language(self) -> &'static str {
        match self {
            Script::Bengali => "bn",
            Script::Devanagari => "hi",
            Script::Latin => "en",
        }
    }

    fn headers(self) -> &'static [&'static str] {
        match self {
            Script::Bengali => BN_HEADERS,
            Script::Devanagari => HI_HEADERS,
            Script::Latin => EN_HEADERS,
        }
    }

    fn words(self) -> &'static [&'static str] {
        match self {
            Script::Bengali => BN_WORDS,
            Script::Devanagari => HI_WORDS,
            Script::Latin => EN_WORDS,
        }
    }

    pub fn localize(self, ascii: &str) -> String {
        let digits = match self {
            Script::Bengali => &BN_DIGITS,
            Script::Devanagari => &HI_DIGITS,
            Script::Latin => return ascii.to_string(),
        };
        ascii
            .chars()
            .map(|c| c.to_digit(10).map_or(c, |d| digits[d as usize]))
            .collect()
    }
}

pub fn random_script(rng: &mut ChaCha8Rng) -> Script {
    *[Script::Bengali, Script::Devanagari, Script::Latin].choose(rng).unwrap()
}

fn number(rng: &mut ChaCha8Rng, script: Script) -> String {
    let ascii = match rng.gen_range(0..10) {
        0 => format!("{}.{}", rng.gen_range(0..40), rng.gen_range(0..10)),
        1 => format!("-{}", rng.gen_range(1..20)),
        2 => format!("{}.50", rng.gen_range(0..5)),
        3 => format!("{:02}", rng.gen_range(0..12)),
        _ => rng.gen_range(0..15).to_string(),
    };
    // a few numbers stay in ASCII even in native-script tables
    let script = if rng.gen_bool(0.15) { Script::Latin } else { script };
    script.localize(&ascii)
}

fn word(rng: &mut ChaCha8Rng, script: Script) -> String {
    let own = if rng.gen_bool(0.85) { script } else { random_script(rng) };
    own.words().choose(rng).unwrap().to_string()
}

fn empty(rng: &mut ChaCha8Rng) -> String {
    ["", "", " "].choose(rng).unwrap().to_string()
}

/// A small table with numeric, text and mixed columns, empty cells and
/// repeated values, headed in one or more scripts.
pub fn random_table(rng: &mut ChaCha8Rng, index: usize) -> Table {
    let script = random_script(rng);
    let width = rng.gen_range(2..=6);
    let mut headers: Vec<String> = Vec::new();
    while headers.len() < width {
        let s = if rng.gen_bool(0.8) { script } else { random_script(rng) };
        let h = s.headers().choose(rng).unwrap().to_string();
        if !headers.contains(&h) {
            headers.push(h);
        }
    }
    // 0 numeric, 1 text, 2 mixed
    let kinds: Vec<u8> = (0..width).map(|_| rng.gen_range(0..3)).collect();
    let n_rows = rng.gen_range(0..=12);
    let rows: Vec<Vec<String>> = (0..n_rows)
        .map(|_| {
            kinds
                .iter()
                .map(|&k| {
                    if rng.gen_bool(0.1) {
                        return empty(rng);
                    }
                    match k {
                        0 => number(rng, script),
                        1 => word(rng, script),
                        _ if rng.gen_bool(0.5) => number(rng, script),
                        _ => word(rng, script),
                    }
                })
                .collect()
        })
        .collect();
    Table::new(format!("t{index}"), headers, rows, script.language()).expect("generated tables are valid")
}
