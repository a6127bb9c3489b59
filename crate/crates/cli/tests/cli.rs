use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/corpus")
}

fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

fn serbest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_serbest")).args(args).env_remove("SERBEST_GRAMMAR_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn case(id: &str) -> String {
    corpus().join(format!("{id}.fs")).display().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn realize_examples() {
    let o = serbest(&["realize", &case("ex7")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Dün kitabı Ahmet bıraktı masada.\n");
    let o = serbest(&["realize", &case("ex3")]);
    assert_eq!(stdout(&o), "Ayşe'nin gelişini görmedim.\n");
}

#[test]
fn realize_trace_goes_to_stderr() {
    let o = serbest(&["realize", "--trace", &case("ex7")]);
    assert_eq!(stdout(&o), "Dün kitabı Ahmet bıraktı masada.\n");
    let err = stderr(&o);
    let emitted: Vec<&str> =
        err.lines().filter_map(|l| l.split('\t').nth(1)).filter(|e| *e != "NIL").collect();
    assert_eq!(emitted, ["time", "dir-obj", "subject", "verb", "location"]);
}

#[test]
fn realize_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.fs",
        "((verb ((root git) (tense past))) (args ((subject \"Ali\"))) (control ((focus goal))))",
    );
    let o = serbest(&["realize", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error[control-names-absent-constituent] at control.focus"), "{}", stderr(&o));

    let unknown = write(dir.path(), "unknown.fs", "((verb ((root zzz) (tense past))))");
    let o = serbest(&["realize", &unknown]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error[unknown-lexeme]"));

    let syntax = write(dir.path(), "syntax.fs", "((verb ((root git))");
    let o = serbest(&["realize", &syntax]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error[syntax-error]"));
}

#[test]
fn batch_output_keeps_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::new();
    let mut expected = String::new();
    for (noun, form) in [("okul", "okula"), ("ev", "eve"), ("masa", "masaya"), ("Ankara", "Ankara'ya")].iter().cycle().take(40) {
        text.push_str(&format!("((verb ((root git) (tense past))) (args ((subject \"Ali\") (goal {noun:?}))))\n"));
        expected.push_str(&format!("Ali {form} gitti.\n"));
    }
    let f = write(dir.path(), "batch.fs", &text);
    let first = serbest(&["realize", &f]);
    assert_eq!(stdout(&first), expected);
    assert_eq!(serbest(&["realize", &f]).stdout, first.stdout);
}

#[test]
fn morph_command() {
    let o = serbest(&["morph", "ev+ABL"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "evden\n".to_string()));
    let o = serbest(&["morph", "kitap"]);
    assert_eq!(stdout(&o), "kitap\n");
    let o = serbest(&["morph", "kitap+ACC+P3SG"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error[tag-order-violation]"));
}

#[test]
fn np_command() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "np.fs", "((modf ((quant-mod \"3\"))) (ref ((arg dakika))))");
    let o = serbest(&["np", "--case", "loc", &f]);
    assert_eq!(stdout(&o), "3 dakikada\n");
}

#[test]
fn variants_command() {
    let o = serbest(&["variants", &case("ex1a")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let sentences: Vec<&str> = out.lines().map(|l| l.split_once('\t').unwrap().1).collect();
    assert!(sentences.contains(&"Ahmet bugün evden okula otobüsle 3 dakikada gitti."));
    assert!(sentences.contains(&"Bugün evden okula otobüsle 3 dakikada Ahmet gitti."));
    let distinct: std::collections::HashSet<_> = sentences.iter().collect();
    assert_eq!(distinct.len(), sentences.len());

    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "verb.fs", "((verb ((root git) (tense past))))");
    let o = serbest(&["variants", &f]);
    assert_eq!(stdout(&o), "topic=- focus=- backgr=-\tGitti.\n");
}

#[test]
fn corpus_command() {
    let o = serbest(&["corpus", &corpus().display().to_string()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("11 passed, 0 failed\n"));

    let dir = tempfile::tempdir().unwrap();
    let o = serbest(&["corpus", &dir.path().display().to_string()]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "0 passed, 0 failed\n".to_string()));

    for id in ["ex5", "ex2b"] {
        std::fs::copy(corpus().join(format!("{id}.fs")), dir.path().join(format!("{id}.fs"))).unwrap();
        std::fs::copy(corpus().join(format!("{id}.gold")), dir.path().join(format!("{id}.gold"))).unwrap();
    }
    write(dir.path(), "ex5.gold", "Ahmet dün kitabı masada bırakmadı.\n");
    let o = serbest(&["corpus", &dir.path().display().to_string()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert_eq!(out.matches("FAIL").count(), 1);
    assert!(out.contains("  - Ahmet dün kitabı masada bırakmadı.\n  + Ahmet dün kitabı masada bıraktı.\n"));
}

#[test]
fn grammar_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(data().join("sentence.rules"), dir.path().join("sentence.rules")).unwrap();
    std::fs::copy(data().join("np.rules"), dir.path().join("np.rules")).unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_serbest"))
            .args(["realize", &case("ex5")])
            .env("SERBEST_GRAMMAR_DIR", dir.path())
            .output()
            .unwrap()
    };
    assert_eq!(stdout(&run()), "Ahmet dün kitabı masada bıraktı.\n");
    std::fs::write(dir.path().join("np.rules"), "(<NP> <==> (<Missing>) ())").unwrap();
    let o = run();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error[undefined-nonterminal]"), "{}", stderr(&o));
}
