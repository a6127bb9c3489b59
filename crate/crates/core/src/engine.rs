//! The realizer: grammar plus lexicon, and the walk from a validated
//! case-frame to text.

use std::convert::Infallible;
use std::path::{Path, PathBuf};

use crate::caseframe::{
    validate, validate_frame, Aspect, CaseFrame, ClauseType, ComplexSentence, Constituent, Control, Polarity,
    QuesType, Role, SForm, SchemaErrors, SpeechAct, Tense, Voice,
};
use crate::fs::{FeatureStructure, Value};
use crate::grammar::{self, CompiledGrammar, DeriveError, GrammarError};
use crate::lexicon::{self, Category, LexEntry, Lexicon, LexiconError, Nominalizer};
use crate::morph::{self, Agreement, MorphError, Tag, WordForm};
use crate::np::{is_dropped, np_agreement, Case};
use crate::order::{self, PlanError, SlotKind};
use crate::text;

pub const SENTENCE_RULES: &str = include_str!("../data/sentence.rules");
pub const NP_RULES: &str = include_str!("../data/np.rules");

/// Builtin symbols of the shipped rule files.
pub const BUILTINS: [&str; 26] = [
    "subject",
    "time",
    "place",
    "dir-obj",
    "beneficiary",
    "source",
    "goal",
    "location",
    "instrument",
    "value",
    "path",
    "duration",
    "manner",
    "verb",
    "nil",
    "possessor",
    "spec-rel",
    "set-spec",
    "det",
    "demons",
    "mod-rel",
    "ordinal",
    "quant",
    "qual",
    "classifier",
    "head",
];

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("io-error: {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Grammar { path: String, source: GrammarError },
    #[error("{path}: {source}")]
    Lexicon { path: String, source: LexiconError },
}

impl EngineError {
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::Io { .. } => "io-error",
            EngineError::Grammar { source, .. } => source.code(),
            EngineError::Lexicon { source, .. } => source.code(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RealizeError {
    #[error("{0}")]
    Schema(SchemaErrors),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("{0}")]
    Grammar(DeriveError<Infallible>),
    #[error("unsupported-s-form: {0} clauses are not realized")]
    UnsupportedSForm(SForm),
    #[error("roles-present at {0}: gapped participle modifiers are not supported")]
    RolesPresent(String),
    #[error("unknown-lexeme '{lemma}' ({category})")]
    UnknownLexeme { lemma: String, category: String },
    #[error(transparent)]
    Morph(#[from] MorphError),
    #[error(transparent)]
    Lexicon(LexiconError),
    #[error("unsupported-combination: {0}")]
    Unsupported(String),
    #[error("unknown-conjunction '{0}'")]
    UnknownConjunction(String),
    #[error("unknown-link-relation '{0}'")]
    UnknownLinkRelation(String),
}

impl RealizeError {
    pub fn code(&self) -> &'static str {
        match self {
            RealizeError::Schema(e) => e.codes().first().copied().unwrap_or("schema-error"),
            RealizeError::Plan(e) => e.code(),
            RealizeError::Grammar(e) => e.code(),
            RealizeError::UnsupportedSForm(_) => "unsupported-s-form",
            RealizeError::RolesPresent(_) => "roles-present",
            RealizeError::UnknownLexeme { .. } => "unknown-lexeme",
            RealizeError::Morph(e) => e.code(),
            RealizeError::Lexicon(e) => e.code(),
            RealizeError::Unsupported(_) => "unsupported-combination",
            RealizeError::UnknownConjunction(_) => "unknown-conjunction",
            RealizeError::UnknownLinkRelation(_) => "unknown-link-relation",
        }
    }

    /// Input rejected by the schema, as opposed to a failure while realizing.
    pub fn is_validation(&self) -> bool {
        matches!(self, RealizeError::Schema(_))
    }
}

fn lexicon_err(e: LexiconError) -> RealizeError {
    match e {
        LexiconError::MissingEntry { lemma, category } => RealizeError::UnknownLexeme { lemma, category },
        other => RealizeError::Lexicon(other),
    }
}

#[derive(Debug, Clone)]
pub struct Engine {
    pub grammar: CompiledGrammar,
    pub lexicon: Lexicon,
}

/// The sentence rules come first so the start symbol is the sentence machine's.
fn compile_grammar(sentence: (&str, &str), np: (&str, &str)) -> Result<CompiledGrammar, EngineError> {
    let err = |path: &str, source| EngineError::Grammar { path: path.into(), source };
    let mut rules = grammar::parse_rule_file(sentence.0).map_err(|e| err(sentence.1, e))?;
    rules.extend(grammar::parse_rule_file(np.0).map_err(|e| err(np.1, e))?);
    grammar::compile(rules, BUILTINS).map_err(|e| err(sentence.1, e))
}

fn load_lexicon(text: &str, path: &str) -> Result<Lexicon, EngineError> {
    Lexicon::load(text).map_err(|source| EngineError::Lexicon { path: path.into(), source })
}

fn read(path: &Path) -> Result<String, EngineError> {
    std::fs::read_to_string(path).map_err(|source| EngineError::Io { path: path.to_path_buf(), source })
}

impl Engine {
    pub fn new(grammar: CompiledGrammar, lexicon: Lexicon) -> Self {
        Engine { grammar, lexicon }
    }

    /// The shipped grammar and lexicon.
    pub fn shipped() -> Engine {
        Engine::from_sources(SENTENCE_RULES, NP_RULES, lexicon::SHIPPED_LEXICON).expect("shipped data is valid")
    }

    pub fn from_sources(sentence: &str, np: &str, lexicon: &str) -> Result<Engine, EngineError> {
        let grammar = compile_grammar((sentence, "sentence.rules"), (np, "np.rules"))?;
        let lexicon = load_lexicon(lexicon, "lexicon.tlx")?;
        Ok(Engine { grammar, lexicon })
    }

    /// Loads `sentence.rules` and `np.rules` from `grammar_dir` and the lexicon
    /// from `lexicon`; either falls back to the shipped data when `None`.
    pub fn load(grammar_dir: Option<&Path>, lexicon: Option<&Path>) -> Result<Engine, EngineError> {
        let grammar = match grammar_dir {
            Some(dir) => {
                let (sp, np) = (dir.join("sentence.rules"), dir.join("np.rules"));
                let (st, nt) = (read(&sp)?, read(&np)?);
                compile_grammar((&st, &sp.display().to_string()), (&nt, &np.display().to_string()))?
            }
            None => compile_grammar((SENTENCE_RULES, "sentence.rules"), (NP_RULES, "np.rules"))?,
        };
        let lexicon = match lexicon {
            Some(p) => load_lexicon(&read(p)?, &p.display().to_string())?,
            None => lexicon::shipped(),
        };
        Ok(Engine { grammar, lexicon })
    }

    pub fn session(&self) -> Session<'_> {
        Session { engine: self, words: Vec::new(), warnings: Vec::new() }
    }

    /// Validates and realizes one input structure.
    pub fn realize(&self, fs: &FeatureStructure) -> Result<String, RealizeError> {
        self.session().realize(fs)
    }

    /// Ordering traces of every simple sentence in the input.
    pub fn trace(&self, fs: &FeatureStructure) -> Result<String, RealizeError> {
        fn walk(e: &Engine, cs: &ComplexSentence, out: &mut String) -> Result<(), RealizeError> {
            match cs {
                ComplexSentence::Simple(cf) => {
                    let (_, d) = order::plan_with_derivation(&e.grammar, cf)?;
                    out.push_str(&order::trace(&d));
                }
                ComplexSentence::Conj { elements, .. } => {
                    for el in elements {
                        walk(e, el, out)?;
                    }
                }
                ComplexSentence::Linked { arg1, arg2, .. } => {
                    walk(e, arg1, out)?;
                    walk(e, arg2, out)?;
                }
            }
            Ok(())
        }
        let cs = validate(fs).map_err(RealizeError::Schema)?;
        let mut out = String::new();
        walk(self, &cs, &mut out)?;
        Ok(out)
    }

    /// Every distinct realization of `cf` under the valid control
    /// assignments, in enumeration order.
    pub fn variants(&self, cf: &CaseFrame) -> Result<Vec<(Control, String)>, RealizeError> {
        let mut options: Vec<Option<Role>> = vec![None];
        options.extend(cf.roles().into_iter().map(Some));
        let mut out: Vec<(Control, String)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for &topic in &options {
            for &focus in &options {
                for &backgr in &options {
                    let named: Vec<Role> = [topic, focus, backgr].into_iter().flatten().collect();
                    if (1..named.len()).any(|i| named[..i].contains(&named[i])) {
                        continue;
                    }
                    let ctl = Control { topic, focus, backgr };
                    let frame = with_control(cf, &ctl);
                    match self.session().sentence(&frame) {
                        Ok(s) => {
                            if seen.insert(s.clone()) {
                                out.push((ctl, s));
                            }
                        }
                        Err(RealizeError::Plan(PlanError::FocusConflict { .. } | PlanError::ControlOverlap { .. })) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `cf` with its control replaced.
pub fn with_control(cf: &CaseFrame, ctl: &Control) -> CaseFrame {
    let mut out = cf.clone();
    out.control = ctl.clone();
    out.fs.remove_feature("control");
    let mut c = FeatureStructure::new();
    for (name, r) in [("topic", ctl.topic), ("focus", ctl.focus), ("backgr", ctl.backgr)] {
        if let Some(r) = r {
            c.insert(name, Value::atom(r.as_str()));
        }
    }
    if !c.is_empty() {
        out.fs.insert("control", Value::Struct(c));
    }
    out
}

/// Case a noun phrase takes in `role`.
pub fn role_case(role: Role, np: &FeatureStructure, nominal_clause: bool) -> Case {
    let own = || np.feature("case").and_then(Value::as_token).and_then(|c| c.parse().ok()).unwrap_or(Case::Nom);
    match role {
        Role::Subject if nominal_clause => Case::Gen,
        Role::Subject => Case::Nom,
        Role::DirObj if crate::caseframe::is_indefinite_np(np) => Case::Nom,
        Role::DirObj => Case::Acc,
        Role::Source => Case::Abl,
        Role::Goal | Role::Beneficiary | Role::Value => Case::Dat,
        Role::Location | Role::Duration => Case::Loc,
        Role::Instrument => Case::Ins,
        Role::Time | Role::Place | Role::Manner | Role::Path => own(),
    }
}

/// Case an embedded clause takes in `role`.
fn clause_case(role: Role) -> Case {
    match role {
        Role::Subject => Case::Nom,
        Role::DirObj => Case::Acc,
        r => role_case(r, &FeatureStructure::new(), false),
    }
}

fn voice_tag(v: Voice) -> Option<Tag> {
    match v {
        Voice::Active => None,
        Voice::Passive => Some(Tag::Pass),
        Voice::Causative => Some(Tag::Caus),
        Voice::Reflexive => Some(Tag::Refl),
        Voice::Reciprocal => Some(Tag::Recip),
    }
}

#[derive(Clone, Copy)]
enum Mode {
    Finite,
    Nominal(Case),
}

/// One realization run. Records every word form it generates.
pub struct Session<'e> {
    pub engine: &'e Engine,
    words: Vec<WordForm>,
    warnings: Vec<String>,
}

impl<'e> Session<'e> {
    pub fn words(&self) -> &[WordForm] {
        &self.words
    }

    pub fn into_words(self) -> Vec<WordForm> {
        self.words
    }

    /// Non-fatal findings, such as missing subcategorized roles.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub(crate) fn word(&mut self, entry: &LexEntry, tags: &[Tag]) -> Result<String, RealizeError> {
        let w = morph::generate_entry(entry, tags)?;
        let t = w.text();
        self.words.push(w);
        Ok(t)
    }

    pub fn realize(&mut self, fs: &FeatureStructure) -> Result<String, RealizeError> {
        let cs = validate(fs).map_err(RealizeError::Schema)?;
        self.realize_complex(&cs)
    }

    /// A single frame as a full sentence.
    pub fn sentence(&mut self, cf: &CaseFrame) -> Result<String, RealizeError> {
        self.realize_complex(&ComplexSentence::Simple(cf.clone()))
    }

    pub fn realize_complex(&mut self, cs: &ComplexSentence) -> Result<String, RealizeError> {
        let (body, question) = self.body(cs)?;
        let s = format!("{}{}", text::capitalize(&body), if question { "?" } else { "." });
        Ok(text::nfc(&s))
    }

    fn body(&mut self, cs: &ComplexSentence) -> Result<(String, bool), RealizeError> {
        match cs {
            ComplexSentence::Simple(cf) => {
                let toks = self.realize_sentence(cf)?;
                let q = cf.ques.is_some() || cf.speech_act == SpeechAct::Interrogative;
                Ok((toks.join(" "), q))
            }
            ComplexSentence::Conj { conj, elements } => {
                let lex = &self.engine.lexicon;
                let word = lex
                    .lookup_relation(conj)
                    .filter(|e| e.category == Category::Conj)
                    .or_else(|| lex.lookup(conj, Category::Conj).ok())
                    .map(|e| e.lemma.clone())
                    .ok_or_else(|| RealizeError::UnknownConjunction(conj.clone()))?;
                let mut parts = Vec::new();
                let mut q = false;
                for el in elements {
                    let (b, eq) = self.body(el)?;
                    q |= eq;
                    parts.push(b);
                }
                let last = parts.pop().unwrap_or_default();
                let head = parts.join(", ");
                Ok((if head.is_empty() { last } else { format!("{head} {word} {last}") }, q))
            }
            ComplexSentence::Linked { relation, arg1, arg2 } => {
                let pattern = self
                    .engine
                    .lexicon
                    .lookup_relation(relation)
                    .and_then(|e| e.connective.clone())
                    .ok_or_else(|| RealizeError::UnknownLinkRelation(relation.clone()))?;
                let (a, qa) = self.body(arg1)?;
                let (b, qb) = self.body(arg2)?;
                Ok((pattern.replace("{1}", &a).replace("{2}", &b), qa || qb))
            }
        }
    }

    /// Tokens of a finite clause, without terminal punctuation.
    pub fn realize_sentence(&mut self, cf: &CaseFrame) -> Result<Vec<String>, RealizeError> {
        self.frame_tokens(cf, Mode::Finite)
    }

    /// Tokens of an embedded (nominalized) clause bearing `case`.
    pub fn clause(&mut self, cf: &CaseFrame, case: Case) -> Result<Vec<String>, RealizeError> {
        self.frame_tokens(cf, Mode::Nominal(case))
    }

    fn frame_tokens(&mut self, cf: &CaseFrame, mode: Mode) -> Result<Vec<String>, RealizeError> {
        if matches!(cf.s_form, SForm::Adverbial | SForm::Participle) {
            return Err(RealizeError::UnsupportedSForm(cf.s_form));
        }
        let mode = match (mode, cf.s_form) {
            (Mode::Finite, SForm::Infinitive) => Mode::Nominal(Case::Nom),
            (m, _) => m,
        };
        self.check_subcat(cf);
        let plan = order::plan(&self.engine.grammar, cf)?;
        let nominal = matches!(mode, Mode::Nominal(_));
        let wh: &[Role] = match &cf.ques {
            Some(q) if q.kind == QuesType::Wh && !nominal => &q.consts,
            _ => &[],
        };
        let agr = self.subject_agreement(cf);
        let mut out = Vec::new();
        for slot in &plan.slots {
            match (slot.kind, slot.role) {
                (SlotKind::Verb, _) | (_, None) => {
                    let verb = match mode {
                        Mode::Finite => self.finite_verb(cf, agr)?,
                        Mode::Nominal(case) => self.nominal_verb(cf, agr, case)?,
                    };
                    let last = verb.last().cloned();
                    out.extend(verb);
                    if let (Mode::Finite, Some(q), Some(last)) = (mode, &cf.ques, last) {
                        if q.kind == QuesType::YesNo {
                            out.push(morph::harmonize_particle(&last));
                        }
                    }
                }
                (_, Some(role)) if wh.contains(&role) => {
                    let e = self.engine.lexicon.lookup_wh(role.as_str()).map_err(lexicon_err)?;
                    out.extend(e.lemma.split_whitespace().map(str::to_string));
                }
                (_, Some(role)) => match cf.constituent(role) {
                    Some(Constituent::Np(np)) if is_dropped(np) => {}
                    Some(Constituent::Np(np)) => out.extend(self.realize_np(np, role_case(role, np, nominal))?),
                    Some(Constituent::Clause(c)) => out.extend(self.clause(c, clause_case(role))?),
                    None => {}
                },
            }
        }
        Ok(out)
    }

    fn check_subcat(&mut self, cf: &CaseFrame) {
        if cf.clause_type != ClauseType::Predicative {
            return;
        }
        let Ok(entry) = self.engine.lexicon.lookup(&cf.verb.root, Category::Verb) else { return };
        for r in &entry.subcat.required_roles {
            if !cf.roles().iter().any(|p| p.as_str() == r) {
                self.warnings.push(format!("missing-required-role: '{}' expects {r}", entry.lemma));
            }
        }
    }

    /// Agreement bound by the subject, dropped or not.
    fn subject_agreement(&self, cf: &CaseFrame) -> Option<Agreement> {
        match cf.constituent(Role::Subject)? {
            Constituent::Np(np) => Some(np_agreement(&self.engine.lexicon, np)),
            Constituent::Clause(_) => Some(Agreement::default()),
        }
    }

    fn verb_entry(&self, cf: &CaseFrame) -> Result<&'e LexEntry, RealizeError> {
        self.engine.lexicon.lookup(&cf.verb.root, Category::Verb).map_err(lexicon_err)
    }

    fn stem_tags(cf: &CaseFrame) -> Vec<Tag> {
        let mut tags: Vec<Tag> = voice_tag(cf.voice).into_iter().collect();
        if cf.verb.modality.is_some() {
            tags.push(Tag::Abil);
        }
        if cf.verb.polarity == Polarity::Negative {
            tags.push(Tag::Neg);
        }
        tags
    }

    fn finite_verb(&mut self, cf: &CaseFrame, agr: Option<Agreement>) -> Result<Vec<String>, RealizeError> {
        let negative = cf.verb.polarity == Polarity::Negative;
        match cf.clause_type {
            ClauseType::Attributive => {
                if cf.verb.tense != Tense::Present || !agr.unwrap_or_default().is_default() {
                    return Err(RealizeError::Unsupported(
                        "attributive clauses are realized in the present tense, third person singular only".into(),
                    ));
                }
                let e = self
                    .engine
                    .lexicon
                    .lookup_any(&cf.verb.root, &[Category::Adj, Category::Noun, Category::ProperNoun, Category::Pronoun])
                    .map_err(lexicon_err)?;
                let mut out = vec![e.lemma.clone()];
                if negative {
                    out.push("değil".into());
                }
                return Ok(out);
            }
            ClauseType::Existential => {
                if cf.verb.tense != Tense::Present {
                    return Err(RealizeError::Unsupported("existential clauses are realized in the present tense only".into()));
                }
                return Ok(vec![if negative { "yok" } else { "var" }.into()]);
            }
            ClauseType::Predicative => {}
        }
        let entry = self.verb_entry(cf)?;
        let mut tags = Self::stem_tags(cf);
        let agr = match cf.speech_act {
            SpeechAct::Imperative => {
                tags.push(Tag::Imp);
                agr.unwrap_or(Agreement::new(2, false))
            }
            SpeechAct::Optative => {
                tags.push(Tag::Opt);
                agr.unwrap_or_default()
            }
            SpeechAct::Necessitative => {
                tags.push(Tag::Nec);
                agr.unwrap_or_default()
            }
            SpeechAct::Wish => {
                tags.push(Tag::Cond);
                agr.unwrap_or_default()
            }
            SpeechAct::Declarative | SpeechAct::Interrogative => {
                match (cf.verb.tense, cf.verb.aspect) {
                    (Tense::Past, Some(Aspect::Progressive)) => tags.extend([Tag::Prog, Tag::Past]),
                    (Tense::Past, Some(Aspect::Habitual)) => tags.extend([Tag::Aor, Tag::Past]),
                    (Tense::Past, _) => tags.push(Tag::Past),
                    (Tense::Present, Some(Aspect::Habitual)) => tags.push(Tag::Aor),
                    (Tense::Present, _) => tags.push(Tag::Prog),
                    (Tense::Future, _) => tags.push(Tag::Fut),
                }
                agr.unwrap_or_default()
            }
        };
        tags.push(agr.verbal());
        Ok(vec![self.word(entry, &tags)?])
    }

    fn nominal_verb(&mut self, cf: &CaseFrame, agr: Option<Agreement>, case: Case) -> Result<Vec<String>, RealizeError> {
        if cf.clause_type != ClauseType::Predicative {
            return Err(RealizeError::Unsupported(format!("{} clauses cannot be nominalized", cf.clause_type)));
        }
        let entry = self.verb_entry(cf)?;
        let mut tags = Self::stem_tags(cf);
        let nominalizer = cf.verb.nominalizer.or(entry.flags.nominalizer).unwrap_or(Nominalizer::Ma);
        tags.push(match nominalizer {
            Nominalizer::Ma => Tag::InfMa,
            Nominalizer::Is => Tag::InfIs,
        });
        tags.push(agr.unwrap_or_default().possessive());
        tags.extend(case.tag());
        Ok(vec![self.word(entry, &tags)?])
    }
}

/// Validates `fs` as a simple frame; convenience for callers that do not
/// accept complex sentences.
pub fn frame(fs: &FeatureStructure) -> Result<CaseFrame, RealizeError> {
    validate_frame(fs).map_err(RealizeError::Schema)
}
