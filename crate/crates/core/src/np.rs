//! Noun-phrase linearization and realization.

use std::fmt;
use std::str::FromStr;

use crate::caseframe::validate_frame;
use crate::engine::{RealizeError, Session};
use crate::fs::{FeatureStructure, Value};
use crate::grammar::{self, Child, Node, Silent};
use crate::lexicon::{Category, LexEntry, Lexicon, LexiconError};
use crate::morph::{Agreement, Tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    Nom,
    Acc,
    Dat,
    Loc,
    Abl,
    Gen,
    Ins,
}

impl Case {
    pub fn tag(self) -> Option<Tag> {
        Some(match self {
            Case::Nom => return None,
            Case::Acc => Tag::Acc,
            Case::Dat => Tag::Dat,
            Case::Loc => Tag::Loc,
            Case::Abl => Tag::Abl,
            Case::Gen => Tag::Gen,
            Case::Ins => Tag::Ins,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Case::Nom => "nom",
            Case::Acc => "acc",
            Case::Dat => "dat",
            Case::Loc => "loc",
            Case::Abl => "abl",
            Case::Gen => "gen",
            Case::Ins => "ins",
        }
    }
}

impl FromStr for Case {
    type Err = String;

    fn from_str(s: &str) -> Result<Case, String> {
        Ok(match s.to_lowercase().as_str() {
            "nom" => Case::Nom,
            "acc" => Case::Acc,
            "dat" => Case::Dat,
            "loc" => Case::Loc,
            "abl" => Case::Abl,
            "gen" => Case::Gen,
            "ins" | "with" => Case::Ins,
            other => return Err(format!("unknown case '{other}'")),
        })
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NpSlotKind {
    Possessor,
    SpecRel,
    SetSpec,
    Det,
    Demons,
    ModRel,
    Ordinal,
    Quant,
    Qual,
    Classifier,
    Head,
    /// Possessor scrambled past the head.
    MovedPossessor,
}

impl NpSlotKind {
    fn of_builtin(name: &str, state: &str) -> Option<NpSlotKind> {
        Some(match name {
            "possessor" if state == "n12" => NpSlotKind::MovedPossessor,
            "possessor" => NpSlotKind::Possessor,
            "spec-rel" => NpSlotKind::SpecRel,
            "set-spec" => NpSlotKind::SetSpec,
            "det" => NpSlotKind::Det,
            "demons" => NpSlotKind::Demons,
            "mod-rel" => NpSlotKind::ModRel,
            "ordinal" => NpSlotKind::Ordinal,
            "quant" => NpSlotKind::Quant,
            "qual" => NpSlotKind::Qual,
            "classifier" => NpSlotKind::Classifier,
            "head" => NpSlotKind::Head,
            _ => return None,
        })
    }

    pub fn is_specifier(self) -> bool {
        matches!(self, NpSlotKind::Possessor | NpSlotKind::SpecRel | NpSlotKind::SetSpec | NpSlotKind::Det | NpSlotKind::Demons)
    }

    pub fn is_modifier(self) -> bool {
        matches!(self, NpSlotKind::ModRel | NpSlotKind::Ordinal | NpSlotKind::Quant | NpSlotKind::Qual)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NpSlot {
    pub kind: NpSlotKind,
    pub value: Value,
}

fn lexicon_err(e: LexiconError) -> RealizeError {
    match e {
        LexiconError::MissingEntry { lemma, category } => RealizeError::UnknownLexeme { lemma, category },
        other => RealizeError::Lexicon(other),
    }
}

fn token_of(v: &Value) -> Option<&str> {
    v.as_token()
}

/// Adds the lexically determined ordering hints.
fn annotate(lex: &Lexicon, np: &FeatureStructure) -> Result<FeatureStructure, RealizeError> {
    let mut hints = FeatureStructure::new();
    if let Some(det) = np.lookup("spec.det.quantifier").and_then(token_of) {
        let entry = lex.lookup(det, Category::Det).map_err(lexicon_err)?;
        if entry.flags.det_position.as_deref() == Some("pre") {
            hints.insert("det-first", Value::atom("+"));
        }
        if entry.flags.article && np.lookup("modf.qualy-mod").is_some() {
            hints.insert("article-late", Value::atom("+"));
        }
    }
    let mut out = np.clone();
    out.remove_feature("hints");
    if !hints.is_empty() {
        out.insert("hints", Value::Struct(hints));
    }
    Ok(out)
}

/// Orders the parts of a noun phrase.
pub fn plan_np(g: &grammar::CompiledGrammar, lex: &Lexicon, np: &FeatureStructure) -> Result<Vec<NpSlot>, RealizeError> {
    if np.feature("roles").is_some() {
        return Err(RealizeError::RolesPresent("roles".into()));
    }
    let input = annotate(lex, np)?;
    let d = grammar::derive(g, "np", &input, &mut Silent).map_err(RealizeError::Grammar)?;
    fn walk(n: &Node, out: &mut Vec<NpSlot>) {
        for c in &n.children {
            match c {
                Child::Node(k) => walk(k, out),
                Child::Emission(e) => {
                    let Some(kind) = NpSlotKind::of_builtin(&e.builtin, &n.nonterminal) else { continue };
                    match (&e.value, kind) {
                        (Value::List(items), NpSlotKind::SpecRel | NpSlotKind::SetSpec | NpSlotKind::ModRel | NpSlotKind::Qual) => {
                            out.extend(items.iter().map(|v| NpSlot { kind, value: v.clone() }))
                        }
                        (v, _) => out.push(NpSlot { kind, value: v.clone() }),
                    }
                }
            }
        }
    }
    let mut slots = Vec::new();
    walk(&d.root, &mut slots);
    Ok(slots)
}

/// Person and number of a noun phrase: explicit `ref agr`, else the
/// head's lexical agreement, else 3sg. A `-possessed` agreement marks the
/// possessor, not the phrase.
pub fn np_agreement(lex: &Lexicon, np: &FeatureStructure) -> Agreement {
    if let Some(a) = np.lookup("ref.agr").and_then(token_of) {
        if !a.contains("possessed") {
            if let Ok(a) = a.parse() {
                return a;
            }
        }
    }
    np.lookup("ref.arg")
        .and_then(token_of)
        .and_then(|h| lex.lookup_any(h, &Category::NOMINAL).ok())
        .and_then(|e| e.agr)
        .unwrap_or_default()
}

fn possessed_by(np: &FeatureStructure) -> Option<Agreement> {
    let a = np.lookup("ref.agr").and_then(token_of)?;
    if a.contains("possessed") { a.parse().ok() } else { None }
}

pub fn is_dropped(np: &FeatureStructure) -> bool {
    np.lookup("ref.control.drop").and_then(Value::as_atom) == Some("+")
}

const ORDINAL_BASES: [&str; 10] = ["bir", "iki", "üç", "dört", "beş", "altı", "yedi", "sekiz", "dokuz", "on"];

impl<'e> Session<'e> {
    fn entry(&self, lemma: &str, cats: &[Category]) -> Result<&'e LexEntry, RealizeError> {
        self.engine.lexicon.lookup_any(lemma, cats).map_err(lexicon_err)
    }

    fn phrase(&mut self, v: &Value) -> Result<Vec<String>, RealizeError> {
        match v {
            Value::Atom(t) | Value::Text(t) => Ok(t.split_whitespace().map(str::to_string).collect()),
            Value::Struct(fs) if fs.feature("verb").is_some() => {
                let cf = validate_frame(fs).map_err(RealizeError::Schema)?;
                self.clause(&cf, Case::Nom)
            }
            Value::Struct(fs) => {
                let case = fs.feature("case").and_then(token_of).and_then(|c| c.parse().ok()).unwrap_or(Case::Nom);
                self.realize_np(fs, case)
            }
            Value::List(items) => {
                let mut out = Vec::new();
                for i in items {
                    out.extend(self.phrase(i)?);
                }
                Ok(out)
            }
        }
    }

    fn possessor(&mut self, v: &Value) -> Result<Vec<String>, RealizeError> {
        match v {
            Value::Struct(fs) if fs.feature("verb").is_some() => {
                let cf = validate_frame(fs).map_err(RealizeError::Schema)?;
                self.clause(&cf, Case::Gen)
            }
            Value::Struct(fs) => self.realize_np(fs, Case::Gen),
            other => {
                let fs = FeatureStructure::new().with("ref", FeatureStructure::new().with("arg", other.clone()));
                self.realize_np(&fs, Case::Gen)
            }
        }
    }

    /// Tags for the head noun: plural, possessive, case.
    pub fn head_tags(&self, np: &FeatureStructure, entry: &LexEntry, case: Case) -> Vec<Tag> {
        let lex = &self.engine.lexicon;
        let mut tags = Vec::new();
        let agr = np_agreement(lex, np);
        if agr.plural && entry.agr.is_none() {
            tags.push(Tag::Pl);
        }
        let possessor = match np.lookup("poss.argument") {
            Some(Value::Struct(p)) if p.feature("verb").is_some() => Some(Agreement::default()),
            Some(Value::Struct(p)) => Some(np_agreement(lex, p)),
            Some(other) => other
                .as_token()
                .and_then(|h| lex.lookup_any(h, &Category::NOMINAL).ok())
                .and_then(|e| e.agr)
                .or(Some(Agreement::default())),
            None => possessed_by(np),
        };
        match possessor {
            Some(a) => tags.push(a.possessive()),
            None if np.feature("class").is_some() => tags.push(Tag::P3sg),
            None => {}
        }
        tags.extend(case.tag());
        tags
    }

    /// Realizes a noun phrase with `case` on its head.
    pub fn realize_np(&mut self, np: &FeatureStructure, case: Case) -> Result<Vec<String>, RealizeError> {
        let engine = self.engine;
        let slots = plan_np(&engine.grammar, &engine.lexicon, np)?;
        let mut out = Vec::new();
        for slot in slots {
            match slot.kind {
                NpSlotKind::Possessor | NpSlotKind::MovedPossessor => out.extend(self.possessor(&slot.value)?),
                NpSlotKind::SpecRel | NpSlotKind::ModRel => out.extend(self.phrase(&slot.value)?),
                NpSlotKind::SetSpec => match &slot.value {
                    Value::Struct(fs) => out.extend(self.realize_np(fs, Case::Abl)?),
                    other => {
                        let fs = FeatureStructure::new().with("ref", FeatureStructure::new().with("arg", other.clone()));
                        out.extend(self.realize_np(&fs, Case::Abl)?)
                    }
                },
                NpSlotKind::Det => {
                    let t = token_of(&slot.value).unwrap_or_default();
                    out.push(self.entry(t, &[Category::Det])?.lemma.clone());
                }
                NpSlotKind::Demons => {
                    let t = token_of(&slot.value).unwrap_or_default();
                    out.push(self.entry(t, &[Category::Demons])?.lemma.clone());
                }
                NpSlotKind::Ordinal => {
                    let n: usize =
                        slot.value.as_struct().and_then(|o| o.feature("position")).and_then(token_of).and_then(|t| t.parse().ok()).unwrap_or(1);
                    if (1..=ORDINAL_BASES.len()).contains(&n) {
                        let e = self.entry(ORDINAL_BASES[n - 1], &[Category::Adj, Category::Det])?;
                        out.push(self.word(e, &[Tag::Ord])?);
                    } else {
                        out.push(format!("{n}."));
                    }
                }
                NpSlotKind::Quant => {
                    let t = token_of(&slot.value).unwrap_or_default();
                    if t.chars().all(|c| c.is_ascii_digit()) {
                        out.push(t.to_string());
                    } else {
                        out.push(self.entry(t, &[Category::Adj, Category::Det])?.lemma.clone());
                    }
                }
                NpSlotKind::Qual => {
                    let t = token_of(&slot.value).unwrap_or_default();
                    out.push(self.entry(t, &[Category::Adj, Category::Noun])?.lemma.clone());
                }
                NpSlotKind::Classifier => {
                    let t = token_of(&slot.value).unwrap_or_default();
                    out.push(self.entry(t, &[Category::Noun, Category::ProperNoun])?.lemma.clone());
                }
                NpSlotKind::Head => {
                    let head = np.lookup("ref.arg").and_then(token_of).ok_or_else(|| {
                        RealizeError::UnknownLexeme { lemma: "<none>".into(), category: "noun".into() }
                    })?;
                    let entry = self.entry(head, &Category::NOMINAL)?;
                    let tags = self.head_tags(np, entry, case);
                    out.push(self.word(entry, &tags)?);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Engine;
    use crate::fs::parse_fs;
    use proptest::prelude::*;

    fn np(text: &str, case: Case) -> String {
        let e = Engine::shipped();
        e.session().realize_np(&parse_fs(text).unwrap(), case).unwrap().join(" ")
    }

    fn kinds(text: &str) -> Vec<NpSlotKind> {
        let e = Engine::shipped();
        plan_np(&e.grammar, &e.lexicon, &parse_fs(text).unwrap()).unwrap().iter().map(|s| s.kind).collect()
    }

    #[test]
    fn footnote_5() {
        assert_eq!(np("((poss ((argument ben))) (ref ((arg kitap) (agr 1sg-possessed))))", Case::Nom), "benim kitabım");
        assert_eq!(
            np("((poss ((argument ben) (control ((drop +))))) (ref ((arg kitap) (agr 1sg-possessed))))", Case::Nom),
            "kitabım"
        );
        assert_eq!(
            np("((poss ((argument ben) (control ((move +))))) (ref ((arg kitap) (agr 1sg-possessed))))", Case::Nom),
            "kitabım benim"
        );
    }

    #[test]
    fn cases_and_quantities() {
        assert_eq!(np("((ref ((arg dakika))) (modf ((quant-mod \"3\"))))", Case::Loc), "3 dakikada");
        assert_eq!(np("((ref ((arg kitap))))", Case::Acc), "kitabı");
        assert_eq!(np("((ref ((arg ev))))", Case::Abl), "evden");
        assert_eq!(np("((ref ((arg okul))))", Case::Dat), "okula");
        assert_eq!(np("((ref ((arg kitap))))", Case::Nom), "kitap");
        assert_eq!(np("((ref ((arg kitap) (agr 3pl))))", Case::Loc), "kitaplarda");
        assert_eq!(np("((poss ((argument \"Ali\"))) (ref ((arg kitap))))", Case::Acc), "Ali'nin kitabını");
    }

    #[test]
    fn emphasis_and_article() {
        let t = "((ref ((arg kitap))) (modf ((quant-mod üç) (qualy-mod [kırmızı]) (control ((emphasis quant))))))";
        assert_eq!(np(t, Case::Nom), "kırmızı üç kitap");
        let t = "((ref ((arg kitap))) (modf ((quant-mod üç) (qualy-mod [kırmızı]))))";
        assert_eq!(np(t, Case::Nom), "üç kırmızı kitap");
        let t = "((ref ((arg kitap))) (modf ((quant-mod üç) (qualy-mod [kırmızı]) (control ((emphasis qual))))))";
        assert_eq!(np(t, Case::Nom), "üç kırmızı kitap");
        let t = "((ref ((arg kitap))) (modf ((qualy-mod [kalın kırmızı]))) (spec ((det ((quantifier bir) (definite -))))))";
        assert_eq!(np(t, Case::Nom), "kalın kırmızı bir kitap");
        let t = "((ref ((arg kitap))) (spec ((det ((quantifier bir) (definite -))))))";
        assert_eq!(np(t, Case::Nom), "bir kitap");
    }

    #[test]
    fn determiner_position_is_lexical() {
        let t = "((ref ((arg kitap) (agr 3pl))) (spec ((demons bu) (det ((quantifier bütün))))))";
        assert_eq!(np(t, Case::Nom), "bütün bu kitaplar");
        let t = "((ref ((arg kitap))) (spec ((demons bu) (det ((quantifier her))))))";
        assert_eq!(np(t, Case::Nom), "bu her kitap");
    }

    #[test]
    fn full_order() {
        let t = r#"((poss ((argument "Ali"))) (ref ((arg kapak)))
                   (spec ((spec-rel ["masadaki"]) (set-spec [kitap]) (demons bu)))
                   (modf ((mod-rel ["dünden kalma"]) (ordinal ((position 2))) (quant-mod iki) (qualy-mod [kırmızı])))
                   (class kitap))"#;
        assert_eq!(
            kinds(t),
            vec![
                NpSlotKind::Possessor,
                NpSlotKind::SpecRel,
                NpSlotKind::SetSpec,
                NpSlotKind::Demons,
                NpSlotKind::ModRel,
                NpSlotKind::Ordinal,
                NpSlotKind::Quant,
                NpSlotKind::Qual,
                NpSlotKind::Classifier,
                NpSlotKind::Head
            ]
        );
        assert_eq!(np(t, Case::Nom), "Ali'nin masadaki kitaptan bu dünden kalma ikinci iki kırmızı kitap kapağı");
        assert_eq!(np("((ref ((arg kapak))) (class kitap))", Case::Nom), "kitap kapağı");
    }

    #[test]
    fn errors() {
        let e = Engine::shipped();
        let err = e.session().realize_np(&parse_fs("((ref ((arg zzz))))").unwrap(), Case::Nom).unwrap_err();
        assert_eq!(err.code(), "unknown-lexeme");
        let err = e.session().realize_np(&parse_fs("((ref ((arg kitap))) (roles subject))").unwrap(), Case::Nom).unwrap_err();
        assert_eq!(err.code(), "roles-present");
    }

    #[test]
    fn ordinals() {
        let ord = |n: u32| np(&format!("((ref ((arg kitap))) (modf ((ordinal ((position {n}))))))"), Case::Nom);
        assert_eq!(ord(1), "birinci kitap");
        assert_eq!(ord(3), "üçüncü kitap");
        assert_eq!(ord(4), "dördüncü kitap");
        assert_eq!(ord(6), "altıncı kitap");
        assert_eq!(ord(10), "onuncu kitap");
        assert_eq!(ord(12), "12. kitap");
    }

    fn arb_np() -> impl Strategy<Value = String> {
        (
            any::<bool>(),
            any::<bool>(),
            any::<bool>(),
            prop::option::of(prop::sample::select(vec!["bir", "her", "bütün"])),
            any::<bool>(),
            any::<bool>(),
            any::<bool>(),
            any::<bool>(),
            any::<bool>(),
            prop::option::of(prop::sample::select(vec!["quant", "qual"])),
            any::<bool>(),
        )
            .prop_map(|(poss, spec_rel, set_spec, det, demons, mod_rel, ordinal, quant, qual, emph, class)| {
                let mut spec = Vec::new();
                if spec_rel {
                    spec.push("(spec-rel [\"masadaki\"])".to_string());
                }
                if set_spec {
                    spec.push("(set-spec [kalem])".into());
                }
                if let Some(d) = det {
                    spec.push(format!("(det ((quantifier {d})))"));
                }
                if demons {
                    spec.push("(demons bu)".into());
                }
                let mut modf = Vec::new();
                if mod_rel {
                    modf.push("(mod-rel [\"dünden kalma\"])".to_string());
                }
                if ordinal {
                    modf.push("(ordinal ((position 2)))".into());
                }
                if quant {
                    modf.push("(quant-mod üç)".into());
                }
                if qual {
                    modf.push("(qualy-mod [kırmızı])".into());
                }
                if let Some(e) = emph {
                    modf.push(format!("(control ((emphasis {e})))"));
                }
                let mut out = String::from("((ref ((arg kapak)))");
                if poss {
                    out.push_str(" (poss ((argument \"Ali\")))");
                }
                if !spec.is_empty() {
                    out.push_str(&format!(" (spec ({}))", spec.join(" ")));
                }
                if !modf.is_empty() {
                    out.push_str(&format!(" (modf ({}))", modf.join(" ")));
                }
                if class {
                    out.push_str(" (class kitap)");
                }
                out.push(')');
                out
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn group_order_laws(text in arb_np()) {
            let e = Engine::shipped();
            let fs = parse_fs(&text).unwrap();
            let slots = plan_np(&e.grammar, &e.lexicon, &fs).unwrap();
            let idx = |k: NpSlotKind| slots.iter().position(|s| s.kind == k);
            let all = |f: &dyn Fn(NpSlotKind) -> bool| -> Vec<usize> {
                slots.iter().enumerate().filter(|(_, s)| f(s.kind)).map(|(i, _)| i).collect()
            };
            let late_article = fs.lookup("spec.det.quantifier").and_then(Value::as_token) == Some("bir")
                && fs.lookup("modf.qualy-mod").is_some();
            let specs = all(&|k| k.is_specifier() && !(late_article && k == NpSlotKind::Det));
            let mods = all(&NpSlotKind::is_modifier);
            if let (Some(&s), Some(&m)) = (specs.iter().max(), mods.iter().min()) {
                prop_assert!(s < m, "{slots:?}");
            }
            let head = idx(NpSlotKind::Head).unwrap();
            prop_assert_eq!(head, slots.len() - 1);
            if let Some(c) = idx(NpSlotKind::Classifier) {
                prop_assert_eq!(c + 1, head);
                prop_assert!(mods.iter().all(|&m| m < c));
            }
            if let (Some(mr), Some(q)) = (idx(NpSlotKind::ModRel), all(&|k| matches!(k, NpSlotKind::Quant | NpSlotKind::Qual)).first()) {
                prop_assert!(mr < *q);
            }
            if let Some(sr) = idx(NpSlotKind::SpecRel) {
                prop_assert!(all(&|k| matches!(k, NpSlotKind::Det | NpSlotKind::Demons)).iter().all(|&d| sr < d));
            }
            if let (Some(qn), Some(ql)) = (idx(NpSlotKind::Quant), idx(NpSlotKind::Qual)) {
                match fs.lookup("modf.control.emphasis").and_then(Value::as_token) {
                    Some("quant") => prop_assert!(qn > ql),
                    _ => prop_assert!(qn < ql),
                }
            }
        }
    }
}
