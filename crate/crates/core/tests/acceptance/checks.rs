use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use tabqa::analytics::{classify, OperatorClass};
use tabqa::executor::{execute_batch, AnswerTable};
use tabqa::hashing::stable_u64;
use tabqa::lexicon::KeywordLexicon;
use tabqa::linearizer::Linearizer;
use tabqa::pipeline::{gate_records, generate, read_dataset, reexecutes, GenerateConfig, Manifest, MANIFEST_FILE};
use tabqa::postprocessor::{residue_audit, script_audit, Postprocessor};
use tabqa::quality_gate::{gate_execution, gate_similarity, suggest_threshold, ScoreFile, DEFAULT_THRESHOLD};
use tabqa::sql::{count_keywords, parse};
use tabqa::table_store::{Table, TableStore};
use tabqa::template_engine::{bundled_templates, generate_batch, Instantiation};

use crate::common::random_table;
use crate::labels::LABELLED;
use crate::metrics_oracle;
use crate::Verdict;

fn random_store(n: usize, seed: u64) -> TableStore {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TableStore::new((0..n).map(|i| random_table(&mut rng, i)).collect::<Vec<Table>>())
}

const TRICKY: &[&str] = &[
    "|", "||", " | ", "<", "<<", ">", "<কলাম>", "<রো ১>", "<पंक्ति २>", "<column>", "<row 3>", "a|b", "x <y", "", " ", "  ",
    "১২", "४५", "3.5", "দল", "नाम", "Delhi", "\t", "end ", " start", "<<<", "|<|",
];

fn random_string(rng: &mut ChaCha8Rng) -> String {
    let parts = rng.gen_range(0..=3);
    (0..parts).map(|_| *TRICKY.choose(rng).unwrap()).collect()
}

pub fn c2_linearizer_round_trip() -> Verdict {
    let lexes: Vec<KeywordLexicon> = ["bn", "hi", "en"].iter().map(|l| KeywordLexicon::bundled(l).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 10_000;
    let mut failures = Vec::new();
    for i in 0..n {
        let width = rng.gen_range(1..=5);
        let rows = rng.gen_range(0..=6);
        let headers = (0..width).map(|_| random_string(&mut rng)).collect();
        let cells = (0..rows).map(|_| (0..width).map(|_| random_string(&mut rng)).collect()).collect();
        let table = AnswerTable::new(headers, cells);
        let lin = Linearizer::new(&lexes[i % 3]);
        let text = lin.encode_answer(&table);
        if lin.decode(&text).as_ref() != Ok(&table) {
            failures.push(text);
        }
    }
    if let Some(f) = failures.first() {
        eprintln!("  first failure: {f:?}");
    }
    Verdict {
        pass: failures.is_empty(),
        detail: format!("{}/{n} tables round-trip", n - failures.len()),
    }
}

pub fn c3_metrics_oracle() -> Verdict {
    let (n, bad) = metrics_oracle::disagreements();
    for b in &bad {
        eprintln!("  {b}");
    }
    Verdict {
        pass: bad.is_empty() && n == 25,
        detail: format!("{n} cases, {} disagreements with the exhaustive oracle", bad.len()),
    }
}

fn ten_thousand() -> Vec<Instantiation> {
    let store = random_store(400, 45);
    generate_batch(&bundled_templates(), &store, 10_000, 45)
}

pub fn c4_keyword_envelope() -> Verdict {
    let batch = ten_thousand();
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for inst in &batch {
        *hist.entry(count_keywords(&inst.query_text).unwrap()).or_default() += 1;
    }
    let (lo, hi) = (*hist.keys().next().unwrap(), *hist.keys().last().unwrap());
    let mode = hist.iter().max_by_key(|(k, n)| (**n, std::cmp::Reverse(**k))).map(|(k, _)| *k).unwrap();
    Verdict {
        pass: batch.len() == 10_000 && lo >= 3 && hi <= 10 && mode == 4,
        detail: format!("{} queries, counts {lo}..={hi}, mode {mode}, histogram {hist:?}", batch.len()),
    }
}

fn letters(classes: &std::collections::BTreeSet<OperatorClass>) -> String {
    let mut s: Vec<char> = classes
        .iter()
        .map(|c| match c {
            OperatorClass::Arithmetic => 'A',
            OperatorClass::Sorting => 'S',
            OperatorClass::GroupBy => 'G',
            OperatorClass::Filtering => 'F',
            OperatorClass::SetOp => 'X',
            OperatorClass::Logical => 'L',
        })
        .collect();
    s.sort_unstable();
    s.into_iter().collect()
}

pub fn c5_operator_coverage() -> Verdict {
    let batch = ten_thousand();
    let mut support: BTreeMap<OperatorClass, usize> = OperatorClass::ALL.iter().map(|c| (*c, 0)).collect();
    for inst in &batch {
        for c in classify(&parse(&inst.query_text).unwrap()) {
            *support.get_mut(&c).unwrap() += 1;
        }
    }
    let mut wrong = Vec::new();
    for (query, label) in LABELLED {
        let mut want: Vec<char> = label.chars().collect();
        want.sort_unstable();
        let want: String = want.into_iter().collect();
        match parse(query) {
            Ok(ast) if letters(&classify(&ast)) == want => {}
            Ok(ast) => wrong.push(format!("{query}: {} vs {want}", letters(&classify(&ast)))),
            Err(e) => wrong.push(format!("{query}: {e}")),
        }
    }
    for w in &wrong {
        eprintln!("  {w}");
    }
    let support_txt: Vec<String> = support.iter().map(|(c, n)| format!("{}={n}", c.as_str())).collect();
    Verdict {
        pass: support.values().all(|&n| n > 0) && wrong.is_empty() && LABELLED.len() == 60,
        detail: format!(
            "support {}; {}/{} hand labels agree",
            support_txt.join(" "),
            LABELLED.len() - wrong.len(),
            LABELLED.len()
        ),
    }
}

pub fn c6_gate_arithmetic() -> Verdict {
    // 120 execution failures, 380 scored at or above 0.74, 500 below
    let mut stream = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..1000 {
        let id = format!("q{i:04}");
        if i < 120 {
            stream.push((id, Err(tabqa::executor::ExecError::TypeError("constructed".into()))));
            continue;
        }
        let score = if i < 500 { 0.74 + (i % 26) as f64 / 100.0 } else { 0.7399 - (i % 70) as f64 / 100.0 };
        pairs.push((id.clone(), score));
        stream.push((id, Ok(AnswerTable::default())));
    }
    let scores = ScoreFile::from_pairs(pairs).unwrap();
    let (executed, exec) = gate_execution(stream, false);
    let ids: Vec<String> = executed.into_iter().map(|(id, _)| id).collect();
    let (kept, sim) = gate_similarity(ids, &scores, DEFAULT_THRESHOLD, |s| s.as_str()).unwrap();
    let report = exec.then(&sim);
    let arithmetic = report.reconciles()
        && report.total_in == 1000
        && report.discarded_exec_error == 120
        && report.discarded_below_threshold == 500
        && report.retained == 380
        && kept.len() == 380;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let neg = Normal::new(0.3, 0.08).unwrap();
    let pos = Normal::new(0.9, 0.04).unwrap();
    let sample: Vec<f64> = (0..6000)
        .map(|i| if i % 2 == 0 { neg.sample(&mut rng) } else { pos.sample(&mut rng) })
        .map(|x: f64| x.clamp(0.0, 1.0))
        .collect();
    let suggested = suggest_threshold(&sample, 20).map(|s| s.threshold);
    let valley = matches!(suggested, Ok(t) if t > 0.55 && t < 0.75);
    Verdict {
        pass: arithmetic && valley,
        detail: format!("{report:?}; bimodal 0.3/0.9 threshold {suggested:?}"),
    }
}

fn config(tables: &Path, output: &Path, quota: usize) -> GenerateConfig {
    GenerateConfig {
        tables: tables.to_path_buf(),
        lexicon: "bn".into(),
        quota,
        seed: 11,
        output: output.to_path_buf(),
        shard_size: 500,
        ..GenerateConfig::default()
    }
}

pub fn c7_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let store_path = dir.path().join("tables.store");
    let store = random_store(120, 77);
    store.persist(&store_path).unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let first = generate(&config(&store_path, &a, 3000), None).unwrap();
    let second = generate(&config(&store_path, &b, 3000), Some(&first.manifest)).unwrap();
    let same_manifest = first.manifest == second.manifest;
    let same_bytes = first.manifest.shards.iter().all(|s| fs::read(a.join(&s.file)).unwrap() == fs::read(b.join(&s.file)).unwrap());
    let reloaded = Manifest::load(&a.join(MANIFEST_FILE)).unwrap() == first.manifest;

    let records = read_dataset(&a, None).unwrap();
    let lex = KeywordLexicon::bundled("bn").unwrap();
    let failing = records.iter().filter(|r| !reexecutes(r, &store, &lex)).count();
    Verdict {
        pass: same_manifest && same_bytes && reloaded && failing == 0 && !records.is_empty(),
        detail: format!(
            "{} shards identical: {}; {}/{} records re-execute",
            first.manifest.shards.len(),
            same_manifest && same_bytes,
            records.len() - failing,
            records.len()
        ),
    }
}

const BN_NOISE: &[&str] = &["গণনা", "সর্বোচ্চ", "যোগফল", "৩", "১৯৯৮", "গড়(`x`)", "মোট ৫"];
const HI_NOISE: &[&str] = &["गणना", "अधिकतम", "योग", "७", "२००४", "औसत(`x`)", "कुल ९"];

/// Answers produced in one lexicon, scored against another. Half are real
/// executor output, the rest have keyword forms and digits spliced in.
pub fn c8_postprocess_residue() -> Verdict {
    let bn = KeywordLexicon::bundled("bn").unwrap();
    let hi = KeywordLexicon::bundled("hi").unwrap();
    let store = random_store(60, 88);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut residue = 0;
    let mut before = 0;
    let mut still_foreign_script = 0;
    let mut n = 0;
    for (from, to, noise, seed) in [(&bn, &hi, BN_NOISE, 1u64), (&hi, &bn, HI_NOISE, 2)] {
        let batch = generate_batch(&bundled_templates(), &store, 600, seed);
        for (_, answer) in execute_batch(batch, &store, from).into_iter().filter_map(|(i, r)| Some((i, r.ok()?))) {
            let mut t = answer;
            if rng.gen_bool(0.5) {
                for cell in t.rows.iter_mut().flatten().chain(t.headers.iter_mut()) {
                    if rng.gen_bool(0.3) {
                        *cell = format!("{cell} {}", noise.choose(&mut rng).unwrap());
                    }
                }
            }
            before += residue_audit(&t, from);
            let (out, _) = Postprocessor::new(from, to).run(&t);
            residue += residue_audit(&out, from);
            still_foreign_script += script_audit(&out, from);
            n += 1;
        }
    }
    Verdict {
        pass: n >= 1000 && residue == 0 && before > 0,
        detail: format!(
            "{n} predictions, {before} strings with source digits or keywords before, {residue} after; \
             {still_foreign_script} still carry source-script values for translation"
        ),
    }
}

pub fn c9_throughput() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let store_path = dir.path().join("tables.store");
    random_store(4000, 99).persist(&store_path).unwrap();
    let out = dir.path().join("dataset");
    let mut cfg = config(&store_path, &out, 100_000);
    cfg.shard_size = 25_000;
    let outcome = match generate(&cfg, None) {
        Ok(o) => o,
        Err(e) => {
            return Verdict {
                pass: false,
                detail: format!("generate failed: {e}"),
            }
        }
    };
    let records: Vec<_> = outcome.records.into_values().flatten().collect();
    let generated = outcome.manifest.gate.total_in;
    // synthetic similarity scores, a pure function of the id
    let scores = ScoreFile::from_pairs(
        records
            .iter()
            .map(|r| (r.id.clone(), (stable_u64(&[r.id.as_bytes()]) % 1000) as f64 / 1000.0)),
    )
    .unwrap();
    let unique = records.iter().map(|r| r.id.as_str()).collect::<HashSet<_>>().len();
    let n_records = records.len();
    let (kept, report) = gate_records(records, &scores, DEFAULT_THRESHOLD).unwrap();
    Verdict {
        pass: generated >= 100_000 && unique == n_records && report.reconciles(),
        detail: format!(
            "{generated} queries generated and executed, {n_records} passed execution, {} kept at 0.74",
            kept.len()
        ),
    }
}
