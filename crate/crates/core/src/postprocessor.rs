//! Cross-lingual cleanup of predicted tables: remap digits, then keyword
//! forms, then hand strings still in the source script to an optional
//! external translator.

use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::executor::AnswerTable;
use crate::lexicon::{remap_digits, remap_keywords, KeywordLexicon};

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("translator process: {0}")]
    Process(String),
    #[error("translator endpoint: {0}")]
    Http(String),
    #[error("translator returned {got} lines for {sent} inputs")]
    LineCount { sent: usize, got: usize },
}

/// External value translation. Implementations see one string per request
/// and may be called with batches; any failure leaves the source strings
/// untouched.
pub trait Translator: Sync {
    fn translate_batch(&self, texts: &[String]) -> Result<Vec<String>, TranslateError>;
}

/// Runs `program args...` once per batch, writes one source string per line
/// to its stdin and reads one translation per line from its stdout.
#[derive(Debug, Clone)]
pub struct SubprocessTranslator {
    program: String,
    args: Vec<String>,
}

impl SubprocessTranslator {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        Self {
            program: program.into(),
            args,
        }
    }

    /// Split a shell-like command string on whitespace.
    pub fn from_command_line(cmd: &str) -> Option<Self> {
        let mut parts = cmd.split_whitespace().map(str::to_string);
        let program = parts.next()?;
        Some(Self::new(program, parts.collect()))
    }
}

impl Translator for SubprocessTranslator {
    fn translate_batch(&self, texts: &[String]) -> Result<Vec<String>, TranslateError> {
        let err = |e: std::io::Error| TranslateError::Process(format!("{}: {e}", self.program));
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(err)?;
        let mut input = String::new();
        for t in texts {
            input.push_str(&t.replace('\n', " "));
            input.push('\n');
        }
        let mut stdin = child.stdin.take().expect("piped stdin");
        let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
        let stdout = child.stdout.take().expect("piped stdout");
        let lines: Vec<String> = BufReader::new(stdout).lines().collect::<Result<_, _>>().map_err(err)?;
        writer
            .join()
            .map_err(|_| TranslateError::Process("writer thread panicked".into()))?
            .map_err(err)?;
        let status = child.wait().map_err(err)?;
        if !status.success() {
            return Err(TranslateError::Process(format!("{} exited with {status}", self.program)));
        }
        if lines.len() != texts.len() {
            return Err(TranslateError::LineCount {
                sent: texts.len(),
                got: lines.len(),
            });
        }
        Ok(lines)
    }
}

/// POSTs each source string as `text/plain` and takes the response body as
/// its translation.
#[derive(Debug, Clone)]
pub struct HttpTranslator {
    endpoint: String,
    agent: ureq::Agent,
}

impl HttpTranslator {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            agent: ureq::AgentBuilder::new().timeout(Duration::from_secs(30)).build(),
        }
    }
}

impl Translator for HttpTranslator {
    fn translate_batch(&self, texts: &[String]) -> Result<Vec<String>, TranslateError> {
        texts
            .iter()
            .map(|t| {
                self.agent
                    .post(&self.endpoint)
                    .set("Content-Type", "text/plain; charset=utf-8")
                    .send_string(t)
                    .map_err(|e| TranslateError::Http(e.to_string()))?
                    .into_string()
                    .map(|s| s.trim_end_matches(['\r', '\n']).to_string())
                    .map_err(|e| TranslateError::Http(e.to_string()))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PostprocessReport {
    /// Strings changed by the digit stage.
    pub digit_changes: usize,
    /// Strings changed by the keyword stage.
    pub keyword_changes: usize,
    pub translated: usize,
    /// Strings still in the source script after all stages.
    pub untranslated: usize,
}

impl PostprocessReport {
    pub fn merge(&mut self, other: &PostprocessReport) {
        self.digit_changes += other.digit_changes;
        self.keyword_changes += other.keyword_changes;
        self.translated += other.translated;
        self.untranslated += other.untranslated;
    }
}

pub struct Postprocessor<'a> {
    from: &'a KeywordLexicon,
    to: &'a KeywordLexicon,
    translator: Option<&'a dyn Translator>,
}

impl<'a> Postprocessor<'a> {
    pub fn new(from: &'a KeywordLexicon, to: &'a KeywordLexicon) -> Self {
        Self {
            from,
            to,
            translator: None,
        }
    }

    pub fn with_translator(mut self, translator: &'a dyn Translator) -> Self {
        self.translator = Some(translator);
        self
    }

    /// Digit and keyword stages for one string.
    pub fn remap(&self, s: &str) -> String {
        remap_keywords(&remap_digits(s, self.from, self.to), self.from, self.to)
    }

    fn in_from_script(&self, s: &str) -> bool {
        s.chars().any(|c| self.from.in_script(c))
    }

    pub fn run(&self, table: &AnswerTable) -> (AnswerTable, PostprocessReport) {
        let mut report = PostprocessReport::default();
        let mut out = table.clone();
        let mut strings: Vec<&mut String> = out.headers.iter_mut().chain(out.rows.iter_mut().flatten()).collect();
        for s in strings.iter_mut() {
            let digits = remap_digits(s, self.from, self.to);
            if digits != **s {
                report.digit_changes += 1;
            }
            let keywords = remap_keywords(&digits, self.from, self.to);
            if keywords != digits {
                report.keyword_changes += 1;
            }
            **s = keywords;
        }
        let pending: Vec<usize> = (0..strings.len()).filter(|&i| self.in_from_script(strings[i])).collect();
        if let (Some(tr), false) = (self.translator, pending.is_empty()) {
            let sources: Vec<String> = pending.iter().map(|&i| strings[i].clone()).collect();
            if let Ok(translations) = tr.translate_batch(&sources) {
                for (&i, t) in pending.iter().zip(translations) {
                    if t != *strings[i] {
                        report.translated += 1;
                    }
                    *strings[i] = t;
                }
            }
        }
        report.untranslated = strings.iter().filter(|s| self.in_from_script(s)).count();
        (out, report)
    }
}

/// Digits, then keywords, then translation of leftover source-script strings.
pub fn postprocess(
    pred: &AnswerTable,
    from: &KeywordLexicon,
    to: &KeywordLexicon,
    translator: Option<&dyn Translator>,
) -> (AnswerTable, PostprocessReport) {
    let mut p = Postprocessor::new(from, to);
    if let Some(t) = translator {
        p = p.with_translator(t);
    }
    p.run(pred)
}

fn strings(table: &AnswerTable) -> impl Iterator<Item = &String> {
    table.headers.iter().chain(table.rows.iter().flatten())
}

/// Headers and cells holding any codepoint of `foreign`'s script.
pub fn script_audit(table: &AnswerTable, foreign: &KeywordLexicon) -> usize {
    strings(table).filter(|s| s.chars().any(|c| foreign.in_script(c))).count()
}

/// Headers and cells holding a digit or keyword form of `foreign`. This is
/// what the deterministic stages must clear.
pub fn residue_audit(table: &AnswerTable, foreign: &KeywordLexicon) -> usize {
    strings(table)
        .filter(|s| s.chars().any(|c| foreign.is_native_digit(c)) || !foreign.keyword_forms_in(s).is_empty())
        .count()
}
