//! Golden-file regression cases.
//!
//! A corpus directory holds `<id>.fs` inputs with a `<id>.gold` expected
//! sentence and optionally `<id>.trace`, the expected constituent emission
//! sequence. An `orthography.tsv` table, when present, is applied to both
//! sides before comparison.

use std::path::{Path, PathBuf};

use crate::caseframe::{validate, ComplexSentence};
use crate::engine::{Engine, RealizeError};
use crate::fs::parse_many;
use crate::morph::WordForm;
use crate::order;
use crate::text::nfc;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("io-error: {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("missing-gold: {0} has no .gold file")]
    MissingGold(PathBuf),
    #[error("gold-not-nfc: {0}")]
    NotNfc(PathBuf),
    #[error("syntax-error: {path}:{line}: expected 'source<TAB>normalized'")]
    Orthography { path: PathBuf, line: usize },
}

impl CorpusError {
    pub fn code(&self) -> &'static str {
        match self {
            CorpusError::Io { .. } => "io-error",
            CorpusError::MissingGold(_) => "missing-gold",
            CorpusError::NotNfc(_) => "gold-not-nfc",
            CorpusError::Orthography { .. } => "syntax-error",
        }
    }
}

fn read(path: &Path) -> Result<String, CorpusError> {
    std::fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })
}

/// Word-level substitutions from transliterated or misprinted source forms
/// to standard orthography.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Orthography {
    pub pairs: Vec<(String, String)>,
}

impl Orthography {
    pub fn parse(text: &str, path: &Path) -> Result<Orthography, CorpusError> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with("# ") {
                continue;
            }
            let (from, to) =
                line.split_once('\t').ok_or(CorpusError::Orthography { path: path.to_path_buf(), line: i + 1 })?;
            pairs.push((from.to_string(), to.to_string()));
        }
        Ok(Orthography { pairs })
    }

    /// Replaces whole words only; punctuation stays attached.
    pub fn normalize(&self, s: &str) -> String {
        let words: Vec<String> = s
            .split(' ')
            .map(|w| {
                let core = w.trim_end_matches(['.', '?', ',', '!']);
                let tail = &w[core.len()..];
                for (from, to) in &self.pairs {
                    if core == from {
                        return format!("{to}{tail}");
                    }
                    let cap = crate::text::capitalize(from);
                    if core == cap {
                        return format!("{}{tail}", crate::text::capitalize(to));
                    }
                }
                w.to_string()
            })
            .collect();
        nfc(&words.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusCase {
    pub id: String,
    pub input_path: PathBuf,
    pub gold: String,
    pub trace_gold: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub cases: Vec<CorpusCase>,
    pub orthography: Orthography,
}

impl Corpus {
    /// Cases sorted by id.
    pub fn load(dir: &Path) -> Result<Corpus, CorpusError> {
        let entries = std::fs::read_dir(dir).map_err(|source| CorpusError::Io { path: dir.to_path_buf(), source })?;
        let mut inputs: Vec<PathBuf> = Vec::new();
        for e in entries {
            let p = e.map_err(|source| CorpusError::Io { path: dir.to_path_buf(), source })?.path();
            if p.extension().is_some_and(|x| x == "fs") {
                inputs.push(p);
            }
        }
        inputs.sort();
        let mut cases = Vec::new();
        for input_path in inputs {
            let id = input_path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let gold_path = input_path.with_extension("gold");
            if !gold_path.exists() {
                return Err(CorpusError::MissingGold(input_path));
            }
            let gold = read(&gold_path)?.trim_end_matches(['\n', '\r']).to_string();
            if nfc(&gold) != gold {
                return Err(CorpusError::NotNfc(gold_path));
            }
            let trace_path = input_path.with_extension("trace");
            let trace_gold = if trace_path.exists() {
                Some(read(&trace_path)?.split_whitespace().map(str::to_string).collect())
            } else {
                None
            };
            cases.push(CorpusCase { id, input_path, gold, trace_gold });
        }
        let ortho_path = dir.join("orthography.tsv");
        let orthography =
            if ortho_path.exists() { Orthography::parse(&read(&ortho_path)?, &ortho_path)? } else { Orthography::default() };
        Ok(Corpus { cases, orthography })
    }

    /// The corpus shipped in this crate's source tree.
    pub fn shipped_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpus")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Pass,
    Mismatch { expected: String, actual: String },
    TraceMismatch { expected: Vec<String>, actual: Vec<String> },
    Error { code: String, message: String },
}

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub id: String,
    pub outcome: Outcome,
    pub output: Option<String>,
    /// Ordering trace of the top-level sentence, when it is simple.
    pub trace: Option<String>,
    pub words: Vec<WordForm>,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

fn error(code: &str, message: impl ToString) -> Outcome {
    Outcome::Error { code: code.to_string(), message: message.to_string() }
}

pub fn run_case(engine: &Engine, ortho: &Orthography, case: &CorpusCase) -> CaseResult {
    let mut result =
        CaseResult { id: case.id.clone(), outcome: Outcome::Pass, output: None, trace: None, words: Vec::new() };
    let text = match std::fs::read_to_string(&case.input_path) {
        Ok(t) => t,
        Err(e) => {
            result.outcome = error("io-error", e);
            return result;
        }
    };
    let fs = match parse_many(&text) {
        Ok(v) if v.len() == 1 => v.into_iter().next().unwrap(),
        Ok(v) => {
            result.outcome = error("malformed", format!("expected one structure, found {}", v.len()));
            return result;
        }
        Err(e) => {
            result.outcome = error(e.code(), e);
            return result;
        }
    };
    let mut session = engine.session();
    let realized = validate(&fs).map_err(RealizeError::Schema).and_then(|cs| {
        let out = session.realize_complex(&cs)?;
        let trace = match &cs {
            ComplexSentence::Simple(cf) => Some(order::plan_with_derivation(&engine.grammar, cf)?.1),
            _ => None,
        };
        Ok((out, trace))
    });
    result.words = session.into_words();
    let (out, derivation) = match realized {
        Ok(v) => v,
        Err(e) => {
            result.outcome = error(e.code(), e);
            return result;
        }
    };
    result.trace = derivation.as_ref().map(order::trace);
    let (expected, actual) = (ortho.normalize(&case.gold), ortho.normalize(&out));
    result.output = Some(out);
    if expected != actual {
        result.outcome = Outcome::Mismatch { expected, actual };
        return result;
    }
    if let Some(tg) = &case.trace_gold {
        let actual = derivation.as_ref().map(order::emission_sequence).unwrap_or_default();
        if &actual != tg {
            result.outcome = Outcome::TraceMismatch { expected: tg.clone(), actual };
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_corpus_passes() {
        let engine = Engine::shipped();
        let corpus = Corpus::load(&Corpus::shipped_dir()).unwrap();
        assert!(corpus.cases.len() >= 11);
        for case in &corpus.cases {
            let r = run_case(&engine, &corpus.orthography, case);
            assert!(r.passed(), "{}: {:?}", case.id, r.outcome);
        }
    }

    #[test]
    fn orthography_table() {
        let o = Orthography::parse("# from\tto\nbiraktı\tbıraktı\nkahn\tkalın\n", Path::new("t")).unwrap();
        assert_eq!(o.normalize("Ahmet dün kitabı masada biraktı."), "Ahmet dün kitabı masada bıraktı.");
        assert_eq!(o.normalize("Kahn kitap."), "Kalın kitap.");
        assert_eq!(o.normalize("kahnlık"), "kahnlık");
        assert!(Orthography::parse("no tab here\n", Path::new("t")).is_err());
    }
}
