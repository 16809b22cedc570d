use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use tabqa::lexicon::KeywordLexicon;
use tabqa::pipeline::{
    self, annotation_sheet, import_annotations, in_workspace, read_dataset, write_sheet, EvaluateOptions,
    GenerateConfig, Manifest, PipelineError, Split, TranslatorSpec, MANIFEST_FILE,
};
use tabqa::quality_gate::{ScoreFile, ThresholdError, DEFAULT_THRESHOLD};
use tabqa::table_store::{TableFormat, TableStore};

/// Synthesize and evaluate table question answering datasets.
#[derive(Parser)]
#[command(name = "tabqa", version, after_help = "Relative paths resolve against $TABQA_WORKSPACE when set.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load raw CSV/TSV/JSONL tables into a store file.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "csv")]
        format: TableFormat,
        #[arg(long, default_value = "bn")]
        language: String,
        #[arg(long)]
        output: PathBuf,
    },
    /// Generate a dataset: instantiate, execute, gate, split and shard.
    Generate(GenerateArgs),
    /// Score predictions against gold answers.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Lexicon of the gold answers.
        #[arg(long, default_value = "bn")]
        lexicon: String,
        #[arg(long)]
        by_class: bool,
        /// Post-process predictions from this lexicon before scoring.
        #[arg(long, value_name = "LEXICON")]
        postprocess: Option<String>,
        #[command(flatten)]
        translator: TranslatorArgs,
        /// Also write the report as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Operator class, keyword count and table shape statistics.
    Stats {
        /// Dataset directory or JSONL file.
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        store: Option<PathBuf>,
        /// Directory for CSV and SVG output.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Apply the similarity gate to dataset records.
    Gate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Suggest a similarity threshold from the score histogram.
    SuggestThreshold {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Write a stratified annotation worksheet, or check a filled one.
    AnnotationSheet {
        /// Dataset directory; the test split is sampled.
        #[arg(long, required_unless_present = "import")]
        dataset: Option<PathBuf>,
        #[arg(long, default_value_t = 30)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, required_unless_present = "import")]
        output: Option<PathBuf>,
        /// Validate a filled sheet and report mean fluency.
        #[arg(long, conflicts_with_all = ["dataset", "output"])]
        import: Option<PathBuf>,
    },
    /// Remap digits and keywords of predictions into another language.
    Postprocess {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[command(flatten)]
        translator: TranslatorArgs,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct GenerateArgs {
    /// TOML configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tables: Option<PathBuf>,
    #[arg(long)]
    table_format: Option<String>,
    #[arg(long)]
    templates: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<String>,
    #[arg(long)]
    quota: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    scores: Option<PathBuf>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    questions: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    shard_size: Option<usize>,
    #[arg(long)]
    drop_empty_answers: bool,
    /// Fail unless the inputs match this manifest.
    #[arg(long)]
    expect_manifest: Option<PathBuf>,
}

#[derive(Args)]
#[group(multiple = false)]
struct TranslatorArgs {
    /// Command translating one line of stdin to one line of stdout.
    #[arg(long)]
    translator_cmd: Option<String>,
    /// Endpoint translating one POSTed string per request.
    #[arg(long)]
    translator_url: Option<String>,
}

impl TranslatorArgs {
    fn spec(&self) -> Option<TranslatorSpec> {
        match (&self.translator_cmd, &self.translator_url) {
            (Some(c), _) => Some(TranslatorSpec::Command(c.clone())),
            (_, Some(u)) => Some(TranslatorSpec::Url(u.clone())),
            _ => None,
        }
    }
}

fn ws(p: &Path) -> PathBuf {
    in_workspace(p)
}

fn lexicon(spec: &str) -> Result<KeywordLexicon> {
    let path = Path::new(spec);
    let resolved = if path.extension().is_some() { ws(path).to_string_lossy().into_owned() } else { spec.to_string() };
    Ok(KeywordLexicon::resolve(&resolved).map_err(PipelineError::from)?)
}

fn generate(args: GenerateArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(p) => GenerateConfig::load(&ws(p))?,
        None => GenerateConfig::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => { $(if let Some(v) = args.$field { cfg.$field = v.into(); })* };
    }
    set!(tables, table_format, lexicon, quota, seed, threshold, output, shard_size);
    if args.templates.is_some() {
        cfg.templates = args.templates;
    }
    if args.scores.is_some() {
        cfg.scores = args.scores;
    }
    if args.questions.is_some() {
        cfg.questions = args.questions;
    }
    cfg.drop_empty_answers |= args.drop_empty_answers;
    cfg.resolve_paths(&pipeline::workspace_dir());
    let expected = args.expect_manifest.map(|p| Manifest::load(&ws(&p))).transpose()?;
    let out = pipeline::generate(&cfg, expected.as_ref())?;
    let m = &out.manifest;
    println!(
        "generated {} records (train {}, validation {}, test {}) into {}",
        m.gate.retained,
        m.counts[&Split::Train],
        m.counts[&Split::Validation],
        m.counts[&Split::Test],
        cfg.output.display()
    );
    println!("{}", serde_json::to_string(&m.gate)?);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest {
            input,
            format,
            language,
            output,
        } => {
            let store = pipeline::ingest(&ws(&input), format, &language, &ws(&output))?;
            println!("stored {} tables in {}", store.len(), output.display());
        }
        Command::Generate(args) => generate(args)?,
        Command::Evaluate {
            pred,
            gold,
            lexicon: lex,
            by_class,
            postprocess,
            translator,
            csv,
        } => {
            let options = EvaluateOptions {
                postprocess_from: postprocess.as_deref().map(lexicon).transpose()?,
                translator: translator.spec(),
            };
            let (report, pp) = pipeline::evaluate(&ws(&pred), &ws(&gold), &lexicon(&lex)?, &options)?;
            if by_class {
                print!("{}", report.to_console());
            } else {
                let o = &report.overall;
                println!(
                    "records {}  table_em {:.2}  row_f1 {:.2}  col_f1 {:.2}  cell_f1 {:.2}",
                    o.records, o.table_em_accuracy, o.row.f1, o.col.f1, o.cell.f1
                );
            }
            if let Some(pp) = pp {
                println!("postprocess: {}", serde_json::to_string(&pp)?);
            }
            if let Some(csv) = csv {
                pipeline::write_text(&ws(&csv), &report.to_csv())?;
            }
        }
        Command::Stats { dataset, store, out_dir } => {
            let records = read_dataset(&ws(&dataset), None)?;
            let store = store.map(|p| TableStore::open(&ws(&p))).transpose()?;
            let report = pipeline::stats(&records, store.as_ref());
            print!("{}", report.to_csv());
            if let Some(dir) = out_dir {
                let dir = ws(&dir);
                pipeline::create_dir(&dir)?;
                pipeline::write_text(&dir.join("stats.csv"), &report.to_csv())?;
                pipeline::write_text(&dir.join("keyword_counts.svg"), &report.keyword_svg())?;
                pipeline::write_text(&dir.join("operator_classes.svg"), &report.class_svg())?;
            }
        }
        Command::Gate {
            input,
            scores,
            threshold,
            output,
        } => {
            if !(0.0..=1.0).contains(&threshold) {
                return Err(PipelineError::Config(format!("threshold {threshold} is outside [0, 1]")).into());
            }
            let records = read_dataset(&ws(&input), None)?;
            let scores = ScoreFile::load(&ws(&scores)).map_err(PipelineError::from)?;
            let (kept, report) = pipeline::gate_records(records, &scores, threshold)?;
            pipeline::write_jsonl(&ws(&output), &kept)?;
            println!("{}", serde_json::to_string(&report)?);
        }
        Command::SuggestThreshold { scores, bins, out_dir } => {
            let scores = ScoreFile::load(&ws(&scores)).map_err(PipelineError::from)?;
            let (histogram, threshold) = match pipeline::suggest(&scores, bins) {
                Ok(s) => {
                    println!("suggested threshold {:.4} (bin {})", s.threshold, s.valley_bin);
                    (s.histogram, Some(s.threshold))
                }
                Err(ThresholdError::NoValley { histogram }) => {
                    println!("no valley between two modes; pass a threshold explicitly");
                    (histogram, None)
                }
                Err(e) => return Err(PipelineError::Config(e.to_string()).into()),
            };
            match out_dir {
                Some(dir) => {
                    let dir = ws(&dir);
                    pipeline::create_dir(&dir)?;
                    pipeline::write_text(&dir.join("histogram.csv"), &histogram.to_csv())?;
                    pipeline::write_text(&dir.join("histogram.svg"), &histogram.to_svg(threshold))?;
                }
                None => print!("{}", histogram.to_csv()),
            }
        }
        Command::AnnotationSheet {
            dataset,
            k,
            seed,
            output,
            import,
        } => {
            if let Some(filled) = import {
                let summary = import_annotations(&ws(&filled))?;
                println!(
                    "{} rows, {} questions written, mean fluency {:.2}",
                    summary.rows, summary.questions_written, summary.mean_fluency
                );
                return Ok(());
            }
            let dir = ws(&dataset.expect("required by clap"));
            let mut excluded = HashSet::new();
            if dir.join(MANIFEST_FILE).is_file() {
                for split in [Split::Train, Split::Validation] {
                    excluded.extend(read_dataset(&dir, Some(split))?.into_iter().map(|r| r.input_table_id));
                }
            }
            let records = if dir.is_dir() { read_dataset(&dir, Some(Split::Test))? } else { read_dataset(&dir, None)? };
            let rows = annotation_sheet(&records, &excluded, k, seed)?;
            let output = ws(&output.expect("required by clap"));
            write_sheet(&output, &rows)?;
            println!("wrote {} rows to {}", rows.len(), output.display());
        }
        Command::Postprocess {
            input,
            from,
            to,
            translator,
            output,
        } => {
            let translator = translator.spec().map(|s| s.build()).transpose()?;
            let outcome = pipeline::postprocess_predictions(&ws(&input), &lexicon(&from)?, &lexicon(&to)?, translator.as_deref())?;
            pipeline::write_jsonl(&ws(&output), &outcome.lines)?;
            println!("{}", serde_json::to_string(&outcome)?);
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<PipelineError>() {
        Some(e) => e.exit_code() as u8,
        None => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        return ExitCode::from(exit_code(&err));
    }
    ExitCode::SUCCESS
}
