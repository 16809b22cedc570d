//! Gate executed queries by outcome and similarity score, and suggest a
//! threshold from a bimodal score sample.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use tabqa::executor::{AnswerTable, ExecError};
use tabqa::quality_gate::{gate_execution, gate_similarity, suggest_threshold, ScoreFile, DEFAULT_THRESHOLD};

fn main() -> anyhow::Result<()> {
    let stream: Vec<(String, Result<AnswerTable, ExecError>)> = (0..10)
        .map(|i| {
            let r = if i == 3 {
                Err(ExecError::TypeError("sum over text".into()))
            } else {
                Ok(AnswerTable::new(vec!["h".into()], vec![vec![i.to_string()]]))
            };
            (format!("r{i}"), r)
        })
        .collect();
    let (ok, exec_report) = gate_execution(stream, false);

    let scores = ScoreFile::from_pairs((0..10).map(|i| (format!("r{i}"), if i % 3 == 0 { 0.43 } else { 0.8 })))?;
    let (kept, sim_report) = gate_similarity(ok, &scores, DEFAULT_THRESHOLD, |(id, _)| id.as_str())?;
    let report = exec_report.then(&sim_report);
    println!("{report:?}  reconciles: {}", report.reconciles());
    println!("kept {:?}", kept.iter().map(|(id, _)| id.as_str()).collect::<Vec<_>>());

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (neg, pos) = (Normal::new(0.3, 0.08)?, Normal::new(0.9, 0.04)?);
    let sample: Vec<f64> = (0..2000)
        .map(|i| if i % 2 == 0 { neg.sample(&mut rng) } else { pos.sample(&mut rng) })
        .map(|x: f64| x.clamp(0.0, 1.0))
        .collect();
    let s = suggest_threshold(&sample, 20)?;
    println!("suggested threshold {:.3}", s.threshold);
    print!("{}", s.histogram.to_csv());
    Ok(())
}
