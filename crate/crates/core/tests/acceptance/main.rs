//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fail.

#[path = "../common/mod.rs"]
mod common;
mod checks;
mod differential;
mod labels;
mod metrics_oracle;

use std::process::ExitCode;
use std::time::{Duration, Instant};

pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

fn c1_executor_differential() -> Verdict {
    let out = differential::run(80, 8000, 7);
    for m in out.mismatches.iter().take(10) {
        eprintln!("  mismatch: {m}");
    }
    Verdict {
        pass: out.mismatches.is_empty() && out.compared >= 5000 && out.tables >= 50,
        detail: format!(
            "{} queries on {} tables, {} agree, {} excluded (sum/avg type errors), {} mismatches",
            out.queries,
            out.tables,
            out.compared,
            out.excluded,
            out.mismatches.len()
        ),
    }
}

/// Name, check and time limit in seconds.
type Criterion = (&'static str, fn() -> Verdict, u64);

const CRITERIA: [Criterion; 9] = [
    ("executor agrees with SQLite", c1_executor_differential, 300),
    ("linearizer round trip", checks::c2_linearizer_round_trip, 30),
    ("metrics match exhaustive oracle", checks::c3_metrics_oracle, 60),
    ("keyword counts in [3,10] with mode 4", checks::c4_keyword_envelope, 300),
    ("all six operator classes, hand labels agree", checks::c5_operator_coverage, 300),
    ("gate reconciles, bimodal valley in (0.55,0.75)", checks::c6_gate_arithmetic, 60),
    ("deterministic shards, records re-execute", checks::c7_determinism, 300),
    ("post-processing leaves no source digits or keywords", checks::c8_postprocess_residue, 300),
    ("100k generate + execute + gate", checks::c9_throughput, 600),
];

fn main() -> ExitCode {
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, check, limit)) in CRITERIA.iter().enumerate() {
        if only.is_some_and(|n| n != i + 1) {
            continue;
        }
        let start = Instant::now();
        let mut v = check();
        let took = start.elapsed();
        v.pass &= took <= Duration::from_secs(*limit);
        failed += usize::from(!v.pass);
        println!(
            "{} criterion {}: {name}: {} ({:.1}s, limit {limit}s)",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail,
            took.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
