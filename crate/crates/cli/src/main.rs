use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use serbest::caseframe::{validate_frame, validate_np};
use serbest::corpus::{run_case, Corpus, Outcome};
use serbest::engine::Engine;
use serbest::fs::{parse_many, FeatureStructure, Value};
use serbest::morph::{self, MorphRequest};
use serbest::np::Case;
use serbest::text::nfc;

/// Surface realizer for Turkish sentences from case-frame feature structures.
#[derive(Parser)]
#[command(name = "serbest", version)]
struct Cli {
    /// Directory holding sentence.rules and np.rules.
    #[arg(long, global = true, env = "SERBEST_GRAMMAR_DIR")]
    grammar: Option<PathBuf>,
    /// Lexicon file (.tlx).
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Realize every structure in the input files ("-" reads stdin).
    Realize {
        /// Print the ordering trace to stderr.
        #[arg(long)]
        trace: bool,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Generate word forms from tag strings such as kitap+P1SG+ACC.
    Morph {
        #[arg(required = true)]
        requests: Vec<String>,
    },
    /// Realize noun-phrase structures.
    Np {
        #[arg(long, default_value = "nom")]
        case: Case,
        input: PathBuf,
    },
    /// List the distinct orders of a frame under all control assignments.
    Variants { input: PathBuf },
    /// Print the ordering trace of each structure.
    Trace { input: PathBuf },
    /// Run a golden corpus directory; defaults to the shipped corpus.
    Corpus { dir: Option<PathBuf> },
}

const VALIDATION: u8 = 1;
const REALIZATION: u8 = 2;

/// Output of one unit of work, kept until it can be printed in order.
#[derive(Default)]
struct Report {
    out: Vec<String>,
    err: Vec<String>,
    status: u8,
}

impl Report {
    fn fail(&mut self, status: u8, line: String) {
        self.err.push(line);
        self.status = self.status.max(status);
    }
}

fn emit(reports: &[Report]) -> ExitCode {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut status = 0;
    for r in reports {
        for l in &r.out {
            let _ = writeln!(out, "{}", nfc(l));
        }
        for l in &r.err {
            eprintln!("{l}");
        }
        status = status.max(r.status);
    }
    let _ = out.flush();
    ExitCode::from(status)
}

fn read_input(path: &Path) -> io::Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

/// Parsed structures of a file, or a report describing why there are none.
fn structures(path: &Path) -> Result<Vec<FeatureStructure>, Report> {
    let mut r = Report::default();
    let name = path.display();
    match read_input(path) {
        Err(e) => r.fail(VALIDATION, format!("error[io-error] {name}: {e}")),
        Ok(text) => match parse_many(&text) {
            Ok(v) => return Ok(v),
            Err(e) => r.fail(VALIDATION, format!("error[{}] {name}: {e}", e.code())),
        },
    }
    Err(r)
}

fn realize(engine: &Engine, inputs: &[PathBuf], trace: bool) -> ExitCode {
    let mut jobs: Vec<(String, FeatureStructure)> = Vec::new();
    let mut reports = Vec::new();
    for path in inputs {
        match structures(path) {
            Ok(v) => {
                let many = v.len() > 1;
                for (i, fs) in v.into_iter().enumerate() {
                    let label = if many { format!("{}#{}", path.display(), i + 1) } else { path.display().to_string() };
                    jobs.push((label, fs));
                }
            }
            Err(r) => reports.push(r),
        }
    }
    let done: Vec<Report> = jobs
        .par_iter()
        .map(|(label, fs)| {
            let mut r = Report::default();
            if trace {
                if let Ok(t) = engine.trace(fs) {
                    r.err.extend(t.lines().map(str::to_string));
                }
            }
            let mut session = engine.session();
            match session.realize(fs) {
                Ok(s) => r.out.push(s),
                Err(serbest::engine::RealizeError::Schema(errs)) => {
                    for e in &errs.0 {
                        r.fail(VALIDATION, format!("{e} ({label})"));
                    }
                }
                Err(e) => r.fail(REALIZATION, format!("error[{}] {label}: {e}", e.code())),
            }
            for w in session.warnings() {
                let (code, msg) = w.split_once(": ").unwrap_or(("warning", w));
                r.err.push(format!("warning[{code}] {label}: {msg}"));
            }
            r
        })
        .collect();
    reports.extend(done);
    emit(&reports)
}

fn morph_cmd(engine: &Engine, requests: &[String]) -> ExitCode {
    let reports: Vec<Report> = requests
        .iter()
        .map(|req| {
            let mut r = Report::default();
            match req.parse::<MorphRequest>().and_then(|q| morph::generate(&engine.lexicon, &q)) {
                Ok(w) => r.out.push(w.text()),
                Err(e) => r.fail(VALIDATION, format!("error[{}] {req}: {e}", e.code())),
            }
            r
        })
        .collect();
    emit(&reports)
}

fn np_cmd(engine: &Engine, input: &Path, case: Case) -> ExitCode {
    let v = match structures(input) {
        Ok(v) => v,
        Err(r) => return emit(&[r]),
    };
    let reports: Vec<Report> = v
        .into_iter()
        .map(|fs| {
            let mut r = Report::default();
            match validate_np(&Value::Struct(fs)) {
                Err(errs) => {
                    for e in &errs.0 {
                        r.fail(VALIDATION, format!("{e} ({})", input.display()));
                    }
                }
                Ok(np) => match engine.session().realize_np(&np, case) {
                    Ok(toks) => r.out.push(toks.join(" ")),
                    Err(e) => r.fail(REALIZATION, format!("error[{}] {}: {e}", e.code(), input.display())),
                },
            }
            r
        })
        .collect();
    emit(&reports)
}

fn variants_cmd(engine: &Engine, input: &Path) -> ExitCode {
    let v = match structures(input) {
        Ok(v) => v,
        Err(r) => return emit(&[r]),
    };
    let reports: Vec<Report> = v
        .iter()
        .map(|fs| {
            let mut r = Report::default();
            match validate_frame(fs) {
                Err(errs) => {
                    for e in &errs.0 {
                        r.fail(VALIDATION, format!("{e} ({})", input.display()));
                    }
                }
                Ok(cf) => match engine.variants(&cf) {
                    Ok(list) => r.out.extend(list.into_iter().map(|(c, s)| format!("{c}\t{s}"))),
                    Err(e) => r.fail(REALIZATION, format!("error[{}] {}: {e}", e.code(), input.display())),
                },
            }
            r
        })
        .collect();
    emit(&reports)
}

fn trace_cmd(engine: &Engine, input: &Path) -> ExitCode {
    let v = match structures(input) {
        Ok(v) => v,
        Err(r) => return emit(&[r]),
    };
    let reports: Vec<Report> = v
        .iter()
        .map(|fs| {
            let mut r = Report::default();
            match engine.trace(fs) {
                Ok(t) => r.out.extend(t.lines().map(str::to_string)),
                Err(e) => {
                    let status = if e.is_validation() { VALIDATION } else { REALIZATION };
                    r.fail(status, format!("error[{}] {}: {e}", e.code(), input.display()))
                }
            }
            r
        })
        .collect();
    emit(&reports)
}

fn corpus_cmd(engine: &Engine, dir: Option<PathBuf>) -> ExitCode {
    let dir = dir.unwrap_or_else(Corpus::shipped_dir);
    let corpus = match Corpus::load(&dir) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error[{}] {}: {e}", e.code(), dir.display());
            return ExitCode::from(REALIZATION);
        }
    };
    let results: Vec<_> = corpus.cases.par_iter().map(|c| run_case(engine, &corpus.orthography, c)).collect();
    let mut report = Report::default();
    let mut failed = 0;
    for r in &results {
        match &r.outcome {
            Outcome::Pass => report.out.push(format!("PASS {}", r.id)),
            Outcome::Mismatch { expected, actual } => {
                report.out.push(format!("FAIL {}", r.id));
                report.out.push(format!("  - {expected}"));
                report.out.push(format!("  + {actual}"));
            }
            Outcome::TraceMismatch { expected, actual } => {
                report.out.push(format!("FAIL {} (trace)", r.id));
                report.out.push(format!("  - {}", expected.join(" ")));
                report.out.push(format!("  + {}", actual.join(" ")));
            }
            Outcome::Error { code, message } => {
                report.out.push(format!("FAIL {} error[{code}]", r.id));
                report.out.push(format!("  {message}"));
            }
        }
        if !r.passed() {
            failed += 1;
        }
    }
    report.out.push(format!("{} passed, {failed} failed", results.len() - failed));
    if failed > 0 {
        report.status = VALIDATION;
    }
    emit(&[report])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let engine = match Engine::load(cli.grammar.as_deref(), cli.lexicon.as_deref()) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error[{}] {e}", e.code());
            return ExitCode::from(REALIZATION);
        }
    };
    match cli.cmd {
        Cmd::Realize { trace, inputs } => realize(&engine, &inputs, trace),
        Cmd::Morph { requests } => morph_cmd(&engine, &requests),
        Cmd::Np { case, input } => np_cmd(&engine, &input, case),
        Cmd::Variants { input } => variants_cmd(&engine, &input),
        Cmd::Trace { input } => trace_cmd(&engine, &input),
        Cmd::Corpus { dir } => corpus_cmd(&engine, dir),
    }
}
