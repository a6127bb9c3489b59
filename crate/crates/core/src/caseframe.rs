//! Typed views over sentence, complex-sentence and noun-phrase feature
//! structures, with alias canonicalization and schema diagnostics.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::fs::{FeatureStructure, Path, Value};
use crate::lexicon::Nominalizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Subject,
    Time,
    Place,
    DirObj,
    Beneficiary,
    Source,
    Goal,
    Location,
    Instrument,
    Value,
    Path,
    Duration,
    Manner,
}

impl Role {
    /// The default constituent order.
    pub const ALL: [Role; 13] = [
        Role::Subject,
        Role::Time,
        Role::Place,
        Role::DirObj,
        Role::Beneficiary,
        Role::Source,
        Role::Goal,
        Role::Location,
        Role::Instrument,
        Role::Value,
        Role::Path,
        Role::Duration,
        Role::Manner,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Subject => "subject",
            Role::Time => "time",
            Role::Place => "place",
            Role::DirObj => "dir-obj",
            Role::Beneficiary => "beneficiary",
            Role::Source => "source",
            Role::Goal => "goal",
            Role::Location => "location",
            Role::Instrument => "instrument",
            Role::Value => "value",
            Role::Path => "path",
            Role::Duration => "duration",
            Role::Manner => "manner",
        }
    }

    pub fn is_argument(self) -> bool {
        !matches!(self, Role::Time | Role::Place | Role::Manner | Role::Path | Role::Duration)
    }

    /// `args` or `adjn`.
    pub fn group(self) -> &'static str {
        if self.is_argument() { "args" } else { "adjn" }
    }

    pub fn path(self) -> Path {
        Path::new([self.group(), self.as_str()]).expect("role paths are valid")
    }

    pub fn index(self) -> usize {
        Role::ALL.iter().position(|r| *r == self).unwrap()
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Role, String> {
        let found = |s: &str| Role::ALL.iter().copied().find(|r| r.as_str() == s || (s == "dirobj" && *r == Role::DirObj));
        if let Some(r) = found(s) {
            return Ok(r);
        }
        let s = s.to_lowercase();
        found(&s)
            .ok_or_else(|| format!("unknown role '{s}'"))
    }
}

macro_rules! token_enum {
    ($name:ident { $($variant:ident = $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const VALUES: &'static [&'static str] = &[$($text),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s.to_lowercase().as_str() {
                    $($text => Ok($name::$variant),)+
                    other => Err(format!("'{other}' is not one of {}", Self::VALUES.join("|"))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

token_enum!(SForm { Finite = "finite", Infinitive = "infinitive", Adverbial = "adverbial", Participle = "participle" });
token_enum!(ClauseType { Predicative = "predicative", Attributive = "attributive", Existential = "existential" });
token_enum!(Voice {
    Active = "active",
    Passive = "passive",
    Causative = "causative",
    Reflexive = "reflexive",
    Reciprocal = "reciprocal",
});
token_enum!(SpeechAct {
    Declarative = "declarative",
    Interrogative = "interrogative",
    Imperative = "imperative",
    Optative = "optative",
    Necessitative = "necessitative",
    Wish = "wish",
});
token_enum!(QuesType { YesNo = "yes-no", Wh = "wh" });
token_enum!(Polarity { Positive = "positive", Negative = "negative" });
token_enum!(Tense { Past = "past", Present = "present", Future = "future" });
token_enum!(Aspect { Perfect = "perfect", Progressive = "progressive", Habitual = "habitual" });
token_enum!(Modality { Potentiality = "potentiality" });

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaError {
    pub code: &'static str,
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() { "<root>" } else { &self.path };
        write!(f, "error[{}] at {}: {}", self.code, path, self.message)
    }
}

/// All violations found in one structure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct SchemaErrors(pub Vec<SchemaError>);

impl SchemaErrors {
    pub fn codes(&self) -> Vec<&'static str> {
        self.0.iter().map(|e| e.code).collect()
    }
}

impl fmt::Display for SchemaErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ques {
    pub kind: QuesType,
    pub consts: Vec<Role>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerbSpec {
    /// Lemma with any leading `#` removed; empty for existential clauses.
    pub root: String,
    pub polarity: Polarity,
    pub tense: Tense,
    pub aspect: Option<Aspect>,
    pub modality: Option<Modality>,
    /// Explicit nominalizer choice for infinitive clauses.
    pub nominalizer: Option<Nominalizer>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Control {
    pub topic: Option<Role>,
    pub focus: Option<Role>,
    pub backgr: Option<Role>,
}

impl Control {
    pub fn is_empty(&self) -> bool {
        self.topic.is_none() && self.focus.is_none() && self.backgr.is_none()
    }
}

impl fmt::Display for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |r: Option<Role>| r.map(|r| r.as_str()).unwrap_or("-");
        write!(f, "topic={} focus={} backgr={}", show(self.topic), show(self.focus), show(self.backgr))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constituent {
    Np(FeatureStructure),
    Clause(Box<CaseFrame>),
}

impl Constituent {
    pub fn fs(&self) -> &FeatureStructure {
        match self {
            Constituent::Np(fs) => fs,
            Constituent::Clause(cf) => &cf.fs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseFrame {
    pub s_form: SForm,
    pub clause_type: ClauseType,
    pub voice: Voice,
    pub speech_act: SpeechAct,
    pub ques: Option<Ques>,
    pub verb: VerbSpec,
    /// Present constituents in default order.
    pub constituents: Arc<Vec<(Role, Constituent)>>,
    pub control: Control,
    /// Canonical feature structure.
    pub fs: FeatureStructure,
}

impl CaseFrame {
    pub fn constituent(&self, role: Role) -> Option<&Constituent> {
        self.constituents.iter().find(|(r, _)| *r == role).map(|(_, c)| c)
    }

    pub fn roles(&self) -> Vec<Role> {
        self.constituents.iter().map(|(r, _)| *r).collect()
    }
}

/// Present constituents in the fixed default order.
pub fn constituents(cf: &CaseFrame) -> Vec<(Role, &Constituent)> {
    cf.constituents.iter().map(|(r, c)| (*r, c)).collect()
}

/// Whether the direct object is a noun phrase marked `definite -`.
pub fn is_indefinite_dirobj(cf: &CaseFrame) -> bool {
    match cf.constituent(Role::DirObj) {
        Some(Constituent::Np(fs)) => is_indefinite_np(fs),
        _ => false,
    }
}

pub fn is_indefinite_np(fs: &FeatureStructure) -> bool {
    fs.lookup("spec.det.definite").and_then(Value::as_atom) == Some("-")
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComplexSentence {
    Simple(CaseFrame),
    Conj { conj: String, elements: Vec<ComplexSentence> },
    Linked { relation: String, arg1: Box<ComplexSentence>, arg2: Box<ComplexSentence> },
}

impl ComplexSentence {
    /// Canonical feature structure of the whole sentence.
    pub fn to_fs(&self) -> FeatureStructure {
        match self {
            ComplexSentence::Simple(cf) => cf.fs.clone(),
            ComplexSentence::Conj { conj, elements } => FeatureStructure::new()
                .with("type", Value::atom("conj"))
                .with("conj", Value::atom(conj))
                .with("elements", Value::List(elements.iter().map(|e| Value::Struct(e.to_fs())).collect())),
            ComplexSentence::Linked { relation, arg1, arg2 } => FeatureStructure::new()
                .with("type", Value::atom("linked"))
                .with("link-relation", Value::atom(relation))
                .with("arg1", arg1.to_fs())
                .with("arg2", arg2.to_fs()),
        }
    }
}

struct Checker {
    errors: Vec<SchemaError>,
}

fn join(path: &str, name: &str) -> String {
    if path.is_empty() { name.to_string() } else { format!("{path}.{name}") }
}

impl Checker {
    fn err(&mut self, code: &'static str, path: &str, message: impl Into<String>) {
        self.errors.push(SchemaError { code, path: path.to_string(), message: message.into() });
    }

    fn token_enum<T: FromStr<Err = String>>(&mut self, fs: &FeatureStructure, name: &str, path: &str, default: T) -> T {
        match fs.feature(name) {
            None => default,
            Some(v) => match v.as_token().map(str::parse::<T>) {
                Some(Ok(t)) => t,
                Some(Err(m)) => {
                    self.err("bad-enum-value", &join(path, name), m);
                    default
                }
                None => {
                    self.err("bad-enum-value", &join(path, name), "expected a token");
                    default
                }
            },
        }
    }

    fn opt_enum<T: FromStr<Err = String>>(&mut self, fs: &FeatureStructure, name: &str, path: &str) -> Option<T> {
        let v = fs.feature(name)?;
        match v.as_token().map(str::parse::<T>) {
            Some(Ok(t)) => Some(t),
            Some(Err(m)) => {
                self.err("bad-enum-value", &join(path, name), m);
                None
            }
            None => {
                self.err("bad-enum-value", &join(path, name), "expected a token");
                None
            }
        }
    }

    fn complex(&mut self, fs: &FeatureStructure, path: &str) -> Option<(ComplexSentence, FeatureStructure)> {
        let Some(kind) = fs.feature("type") else {
            let cf = self.frame(fs, path)?;
            let canon = cf.fs.clone();
            return Some((ComplexSentence::Simple(cf), canon));
        };
        let allowed: &[&str] = match kind.as_token() {
            Some("simple") => &["type", "arg"],
            Some("conj") => &["type", "conj", "elements"],
            Some("linked") => &["type", "link-relation", "arg1", "arg2"],
            _ => {
                self.err("bad-enum-value", &join(path, "type"), "'type' is not one of simple|conj|linked");
                return None;
            }
        };
        for k in fs.keys() {
            if !allowed.contains(&k) {
                self.err("unknown-feature", &join(path, k), format!("'{k}' is not a field of this sentence type"));
            }
        }
        let sub = |c: &mut Checker, name: &str| -> Option<(ComplexSentence, FeatureStructure)> {
            let p = join(path, name);
            match fs.feature(name) {
                Some(Value::Struct(inner)) => c.complex(inner, &p),
                Some(_) => {
                    c.err("malformed", &p, "expected a feature structure");
                    None
                }
                None => {
                    c.err("malformed", &p, format!("missing '{name}'"));
                    None
                }
            }
        };
        match kind.as_token() {
            Some("simple") => {
                let p = join(path, "arg");
                match fs.feature("arg") {
                    Some(Value::Struct(inner)) => {
                        let cf = self.frame(inner, &p)?;
                        let canon = FeatureStructure::new()
                            .with("type", Value::atom("simple"))
                            .with("arg", cf.fs.clone());
                        Some((ComplexSentence::Simple(cf), canon))
                    }
                    _ => {
                        self.err("malformed", &p, "simple sentence needs an 'arg' case-frame");
                        None
                    }
                }
            }
            Some("conj") => {
                let conj = match fs.feature("conj").and_then(Value::as_token) {
                    Some(c) => c.to_lowercase(),
                    None => {
                        self.err("malformed", &join(path, "conj"), "missing conjunction");
                        String::new()
                    }
                };
                let p = join(path, "elements");
                let items = match fs.feature("elements") {
                    Some(Value::List(items)) => items.clone(),
                    _ => {
                        self.err("malformed", &p, "expected a list of sentences");
                        return None;
                    }
                };
                if items.len() < 2 {
                    self.err("malformed", &p, "a conjunction needs at least two elements");
                }
                let mut elements = Vec::new();
                let mut canon = Vec::new();
                for (i, item) in items.iter().enumerate() {
                    let ip = format!("{p}[{i}]");
                    match item {
                        Value::Struct(inner) => {
                            if let Some((e, c)) = self.complex(inner, &ip) {
                                elements.push(e);
                                canon.push(Value::Struct(c));
                            }
                        }
                        _ => self.err("malformed", &ip, "expected a feature structure"),
                    }
                }
                let fs = FeatureStructure::new()
                    .with("type", Value::atom("conj"))
                    .with("conj", Value::atom(&conj))
                    .with("elements", Value::List(canon));
                Some((ComplexSentence::Conj { conj, elements }, fs))
            }
            _ => {
                let relation = match fs.feature("link-relation").and_then(Value::as_token) {
                    Some(r) => r.to_lowercase(),
                    None => {
                        self.err("malformed", &join(path, "link-relation"), "missing link relation");
                        String::new()
                    }
                };
                let a1 = sub(self, "arg1");
                let a2 = sub(self, "arg2");
                let ((a1, c1), (a2, c2)) = (a1?, a2?);
                let fs = FeatureStructure::new()
                    .with("type", Value::atom("linked"))
                    .with("link-relation", Value::atom(&relation))
                    .with("arg1", c1)
                    .with("arg2", c2);
                Some((ComplexSentence::Linked { relation, arg1: Box::new(a1), arg2: Box::new(a2) }, fs))
            }
        }
    }

    fn frame(&mut self, fs: &FeatureStructure, path: &str) -> Option<CaseFrame> {
        let before = self.errors.len();
        let mut canon = FeatureStructure::new();
        let mut constituents: Vec<(Role, Constituent)> = Vec::new();
        let mut control = Control::default();
        let mut verb = None;
        let mut ques = None;
        for (name, value) in fs.iter() {
            let canonical = match name {
                "arguments" => "args",
                "adjuncts" => "adjn",
                "background" => "backgr",
                other => other,
            };
            let p = join(path, name);
            match canonical {
                "s-form" | "clause-type" | "voice" | "speech-act" => {
                    canon.insert(canonical, value.clone());
                }
                "verb" => match value {
                    Value::Struct(v) => {
                        let (spec, vfs) = self.verb(v, &p);
                        verb = Some(spec);
                        canon.insert("verb", Value::Struct(vfs));
                    }
                    _ => self.err("missing-verb", &p, "verb must be a feature structure"),
                },
                "args" | "adjn" => {
                    let Value::Struct(group) = value else {
                        self.err("malformed", &p, "expected a feature structure of roles");
                        continue;
                    };
                    let mut out = match canon.feature(canonical) {
                        Some(Value::Struct(existing)) => existing.clone(),
                        _ => FeatureStructure::new(),
                    };
                    for (role_name, c) in group.iter() {
                        let rp = join(&p, role_name);
                        let role = match role_name.parse::<Role>() {
                            Ok(r) if r.group() == canonical => r,
                            Ok(r) => {
                                self.err(
                                    "unknown-role",
                                    &rp,
                                    format!("'{r}' belongs under {}", if r.is_argument() { "args" } else { "adjn" }),
                                );
                                continue;
                            }
                            Err(m) => {
                                self.err("unknown-role", &rp, m);
                                continue;
                            }
                        };
                        if constituents.iter().any(|(r, _)| *r == role) {
                            self.err("malformed", &rp, format!("role '{role}' given twice"));
                            continue;
                        }
                        if let Some((constituent, cfs)) = self.constituent(c, &rp) {
                            out.insert(role.as_str(), Value::Struct(cfs));
                            constituents.push((role, constituent));
                        }
                    }
                    canon.insert(canonical, Value::Struct(out));
                }
                "control" => {
                    let Value::Struct(ctl) = value else {
                        self.err("malformed", &p, "expected a feature structure");
                        continue;
                    };
                    let mut out = FeatureStructure::new();
                    for (k, v) in ctl.iter() {
                        let ck = if k == "background" { "backgr" } else { k };
                        let kp = join(&p, k);
                        let slot = match ck {
                            "topic" => &mut control.topic,
                            "focus" => &mut control.focus,
                            "backgr" => &mut control.backgr,
                            _ => {
                                self.err("unknown-feature", &kp, format!("'{k}' is not topic|focus|backgr"));
                                continue;
                            }
                        };
                        match v.as_token().map(str::parse::<Role>) {
                            Some(Ok(r)) => {
                                *slot = Some(r);
                                out.insert(ck, Value::atom(r.as_str()));
                            }
                            Some(Err(m)) => self.err("unknown-role", &kp, m),
                            None => self.err("unknown-role", &kp, "expected a role name"),
                        }
                    }
                    canon.insert("control", Value::Struct(out));
                }
                "ques" => {
                    let Value::Struct(q) = value else {
                        self.err("malformed", &p, "expected a feature structure");
                        continue;
                    };
                    let kind = self.token_enum(q, "type", &p, QuesType::YesNo);
                    let mut consts = Vec::new();
                    let items: Vec<Value> = match q.feature("const") {
                        None => Vec::new(),
                        Some(Value::List(items)) => items.clone(),
                        Some(single) => vec![single.clone()],
                    };
                    for (i, item) in items.iter().enumerate() {
                        match item.as_token().map(str::parse::<Role>) {
                            Some(Ok(r)) => consts.push(r),
                            _ => self.err("unknown-role", &format!("{p}.const[{i}]"), "expected a role name"),
                        }
                    }
                    if kind == QuesType::Wh && consts.is_empty() {
                        self.err("malformed", &join(&p, "const"), "wh question names no constituent");
                    }
                    let mut qfs = FeatureStructure::new().with("type", Value::atom(kind.as_str()));
                    if !consts.is_empty() {
                        qfs.insert("const", Value::List(consts.iter().map(|r| Value::atom(r.as_str())).collect()));
                    }
                    canon.insert("ques", Value::Struct(qfs));
                    ques = Some(Ques { kind, consts });
                }
                other => self.err("unknown-feature", &p, format!("'{other}' is not a case-frame feature")),
            }
        }

        let s_form = self.token_enum(fs, "s-form", path, SForm::Finite);
        let clause_type = self.token_enum(fs, "clause-type", path, ClauseType::Predicative);
        let voice = self.token_enum(fs, "voice", path, Voice::Active);
        let speech_act = self.token_enum(fs, "speech-act", path, SpeechAct::Declarative);

        let verb = match verb {
            Some(v) => v,
            None => {
                if fs.feature("verb").is_none() {
                    self.err("missing-verb", &join(path, "verb"), "case-frame has no verb");
                }
                return None;
            }
        };
        if verb.root.is_empty() && clause_type != ClauseType::Existential {
            self.err("missing-verb", &join(path, "verb.root"), "verb has no root");
        }

        constituents.sort_by_key(|(r, _)| r.index());
        let present = |r: Role| constituents.iter().any(|(x, _)| *x == r);
        let ctl_path = join(path, "control");
        for (name, role) in [("topic", control.topic), ("focus", control.focus), ("backgr", control.backgr)] {
            if let Some(r) = role {
                if !present(r) {
                    self.err(
                        "control-names-absent-constituent",
                        &join(&ctl_path, name),
                        format!("{name} names '{r}', which is not present"),
                    );
                }
            }
        }
        if let Some(q) = &ques {
            for r in &q.consts {
                if !present(*r) {
                    self.err(
                        "control-names-absent-constituent",
                        &join(path, "ques.const"),
                        format!("question names '{r}', which is not present"),
                    );
                }
            }
        }
        if self.errors.len() > before {
            return None;
        }
        Some(CaseFrame { s_form, clause_type, voice, speech_act, ques, verb, constituents: Arc::new(constituents), control, fs: canon })
    }

    fn verb(&mut self, v: &FeatureStructure, path: &str) -> (VerbSpec, FeatureStructure) {
        let mut out = FeatureStructure::new();
        for (k, val) in v.iter() {
            let ck = if k == "sense" { "polarity" } else { k };
            match ck {
                "root" => {
                    let root = val.as_token().unwrap_or("").trim_start_matches('#').to_string();
                    if val.as_token().is_none() {
                        self.err("missing-verb", &join(path, k), "root must be a lexeme");
                    }
                    out.insert("root", Value::text(root));
                }
                "polarity" | "tense" | "aspect" | "modality" | "nominalizer" => {
                    out.insert(ck, val.clone());
                }
                other => self.err("unknown-feature", &join(path, other), format!("'{other}' is not a verb feature")),
            }
        }
        let polarity = self.token_enum(&out, "polarity", path, Polarity::Positive);
        let tense = self.token_enum(&out, "tense", path, Tense::Present);
        let aspect = self.opt_enum(&out, "aspect", path);
        let modality = self.opt_enum(&out, "modality", path);
        let nominalizer = match out.feature("nominalizer").and_then(Value::as_token) {
            None => None,
            Some("ma") => Some(Nominalizer::Ma),
            Some("is" | "iş") => Some(Nominalizer::Is),
            Some(other) => {
                self.err("bad-enum-value", &join(path, "nominalizer"), format!("'{other}' is not one of ma|is"));
                None
            }
        };
        let root = out.feature("root").and_then(Value::as_token).unwrap_or("").to_string();
        (VerbSpec { root, polarity, tense, aspect, modality, nominalizer }, out)
    }

    fn constituent(&mut self, v: &Value, path: &str) -> Option<(Constituent, FeatureStructure)> {
        match v {
            Value::Struct(fs) if fs.feature("verb").is_some() => {
                let cf = self.frame(fs, path)?;
                let canon = cf.fs.clone();
                Some((Constituent::Clause(Box::new(cf)), canon))
            }
            other => {
                let fs = self.np(other, path)?;
                Some((Constituent::Np(fs.clone()), fs))
            }
        }
    }

    /// Noun phrase canonicalization: a bare lexeme stands for
    /// `((ref ((arg lexeme))))`.
    fn np(&mut self, v: &Value, path: &str) -> Option<FeatureStructure> {
        let fs = match v {
            Value::Atom(a) => return Some(bare_np(Value::Atom(a.clone()))),
            Value::Text(t) => return Some(bare_np(Value::Text(t.clone()))),
            Value::Struct(fs) => fs,
            Value::List(_) => {
                self.err("malformed", path, "expected a noun phrase");
                return None;
            }
        };
        let before = self.errors.len();
        let mut out = FeatureStructure::new();
        for (k, val) in fs.iter() {
            let kp = join(path, k);
            match k {
                "ref" => {
                    match val.as_struct().and_then(|r| r.feature("arg")) {
                        Some(arg) if arg.as_token().is_some() || arg.as_struct().is_some() => {}
                        _ => self.err("malformed", &join(&kp, "arg"), "noun phrase has no head lexeme"),
                    }
                    out.insert("ref", val.clone());
                }
                "poss" => {
                    let Some(p) = val.as_struct() else {
                        self.err("malformed", &kp, "expected a feature structure");
                        continue;
                    };
                    let mut po = p.clone();
                    if let Some(arg) = p.feature("argument") {
                        let ap = join(&kp, "argument");
                        let canon = match arg {
                            Value::Struct(s) if s.feature("verb").is_some() => self.frame(s, &ap).map(|c| c.fs),
                            other => self.np(other, &ap),
                        };
                        if let Some(c) = canon {
                            po.insert("argument", Value::Struct(c));
                        }
                    }
                    let flag = |n: &str| p.lookup(&format!("control.{n}")).and_then(Value::as_atom) == Some("+");
                    if flag("drop") && flag("move") {
                        self.err("invalid-np", &join(&kp, "control"), "drop and move cannot both be +");
                    }
                    out.insert("poss", Value::Struct(po));
                }
                "spec" => {
                    let Some(s) = val.as_struct() else {
                        self.err("malformed", &kp, "expected a feature structure");
                        continue;
                    };
                    let mut so = s.clone();
                    if let Some(list) = s.feature("set-spec") {
                        let items: Vec<Value> = match list {
                            Value::List(items) => items.clone(),
                            single => vec![single.clone()],
                        };
                        let mut canon = Vec::new();
                        for (i, item) in items.iter().enumerate() {
                            if let Some(c) = self.np(item, &format!("{kp}.set-spec[{i}]")) {
                                canon.push(Value::Struct(c));
                            }
                        }
                        so.insert("set-spec", Value::List(canon));
                    }
                    out.insert("spec", Value::Struct(so));
                }
                "modf" => {
                    if let Some(pos) = val.as_struct().and_then(|m| m.lookup("ordinal.position")) {
                        match pos.as_token().and_then(|t| t.parse::<u32>().ok()) {
                            Some(n) if n >= 1 => {}
                            _ => self.err("invalid-np", &join(&kp, "ordinal.position"), "position must be an integer >= 1"),
                        }
                    }
                    out.insert("modf", val.clone());
                }
                "class" | "roles" | "case" => out.insert(k, val.clone()),
                other => self.err("unknown-feature", &kp, format!("'{other}' is not a noun-phrase feature")),
            }
        }
        if self.errors.len() > before {
            return None;
        }
        Some(out)
    }
}

fn bare_np(arg: Value) -> FeatureStructure {
    FeatureStructure::new().with("ref", FeatureStructure::new().with("arg", arg))
}

/// Validates a complex sentence (or a bare case-frame, read as simple).
pub fn validate(fs: &FeatureStructure) -> Result<ComplexSentence, SchemaErrors> {
    let mut c = Checker { errors: Vec::new() };
    let out = c.complex(fs, "");
    match out {
        Some((cs, _)) if c.errors.is_empty() => Ok(cs),
        _ => Err(SchemaErrors(c.errors)),
    }
}

/// Validates a single case-frame.
pub fn validate_frame(fs: &FeatureStructure) -> Result<CaseFrame, SchemaErrors> {
    let mut c = Checker { errors: Vec::new() };
    let out = c.frame(fs, "");
    match out {
        Some(cf) if c.errors.is_empty() => Ok(cf),
        _ => Err(SchemaErrors(c.errors)),
    }
}

/// Validates and canonicalizes a stand-alone noun phrase.
pub fn validate_np(v: &Value) -> Result<FeatureStructure, SchemaErrors> {
    let mut c = Checker { errors: Vec::new() };
    let out = c.np(v, "");
    match out {
        Some(fs) if c.errors.is_empty() => Ok(fs),
        _ => Err(SchemaErrors(c.errors)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fs::{parse_fs, print_fs};

    pub(crate) const EXAMPLE_5: &str = r##"
((s-form finite) (clause-type predicative) (voice active) (speech-act declarative)
 (verb ((root "#bırak") (sense positive) (tense past) (aspect perfect)))
 (arguments ((subject "Ahmet") (dir-obj kitap) (location masa)))
 (adjuncts ((time dün))))"##;

    fn ex5_with(extra: &str) -> FeatureStructure {
        let t = EXAMPLE_5.trim_end();
        parse_fs(&format!("{}{})", &t[..t.len() - 1], extra)).unwrap()
    }

    #[test]
    fn ex5_is_valid_with_empty_control() {
        let cf = validate_frame(&parse_fs(EXAMPLE_5).unwrap()).unwrap();
        assert!(cf.control.is_empty());
        assert_eq!(cf.verb.root, "bırak");
        assert_eq!(cf.verb.polarity, Polarity::Positive);
        let roles: Vec<Role> = constituents(&cf).iter().map(|(r, _)| *r).collect();
        assert_eq!(roles, vec![Role::Subject, Role::Time, Role::DirObj, Role::Location]);
        assert!(cf.fs.feature("args").is_some() && cf.fs.feature("arguments").is_none());
        assert_eq!(cf.fs.lookup("verb.polarity").and_then(Value::as_atom), Some("positive"));
    }

    #[test]
    fn ex6_control() {
        let cf = validate_frame(&ex5_with("(control ((topic time) (focus subject)))")).unwrap();
        assert_eq!(cf.control, Control { topic: Some(Role::Time), focus: Some(Role::Subject), backgr: None });
        let cf = validate_frame(&ex5_with("(control ((topic time) (focus subject) (background location)))")).unwrap();
        assert_eq!(cf.control.backgr, Some(Role::Location));
    }

    #[test]
    fn schema_errors_carry_paths() {
        let err = validate_frame(&ex5_with("(control ((topic place)))")).unwrap_err();
        assert_eq!(err.codes(), vec!["control-names-absent-constituent"]);
        assert_eq!(err.0[0].path, "control.topic");

        let err = validate_frame(&parse_fs("((args ((subject ali) (colour red))))").unwrap()).unwrap_err();
        assert_eq!(err.codes(), vec!["unknown-role", "missing-verb"]);
        assert_eq!(err.0[0].path, "args.colour");

        let err = validate_frame(&parse_fs("((verb ((root gel) (tense someday))))").unwrap()).unwrap_err();
        assert_eq!(err.codes(), vec!["bad-enum-value"]);
        assert_eq!(err.0[0].path, "verb.tense");

        let err = validate_frame(&parse_fs("((verb ((root gel))) (args ((time dün))))").unwrap()).unwrap_err();
        assert_eq!(err.codes(), vec!["unknown-role"]);
    }

    #[test]
    fn ex1a_constituent_order() {
        let fs = parse_fs(
            r#"((verb ((root git) (tense past)))
               (args ((goal okul) (source ev) (instrument otobüs) (subject "Ahmet")))
               (adjn ((duration ((ref ((arg dakika))) (modf ((quant-mod "3"))))) (time bugün))))"#,
        )
        .unwrap();
        let cf = validate_frame(&fs).unwrap();
        let roles: Vec<Role> = cf.roles();
        assert_eq!(
            roles,
            vec![Role::Subject, Role::Time, Role::Source, Role::Goal, Role::Instrument, Role::Duration]
        );
        let only_verb = validate_frame(&parse_fs("((verb ((root git))))").unwrap()).unwrap();
        assert!(constituents(&only_verb).is_empty());
    }

    #[test]
    fn indefinite_object_detection() {
        let cf = validate_frame(&ex5_with("")).unwrap();
        assert!(!is_indefinite_dirobj(&cf));
        let fs = parse_fs(
            "((verb ((root bırak))) (args ((dir-obj ((ref ((arg kitap))) (spec ((det ((definite -))))))))))",
        )
        .unwrap();
        assert!(is_indefinite_dirobj(&validate_frame(&fs).unwrap()));
        let fs = parse_fs(
            "((verb ((root bırak))) (args ((dir-obj ((ref ((arg kitap))) (spec ((det ((definite +))))))))))",
        )
        .unwrap();
        assert!(!is_indefinite_dirobj(&validate_frame(&fs).unwrap()));
        let fs = parse_fs("((verb ((root git))))").unwrap();
        assert!(!is_indefinite_dirobj(&validate_frame(&fs).unwrap()));
    }

    #[test]
    fn clauses_are_detected_structurally() {
        let fs = parse_fs(
            r#"((verb ((root gör) (polarity negative) (tense past)))
               (args ((subject ((ref ((arg ben) (control ((drop +)))))))
                      (dir-obj ((s-form infinitive) (verb ((root gel))) (args ((subject "Ayşe"))))))))"#,
        )
        .unwrap();
        let cf = validate_frame(&fs).unwrap();
        assert!(matches!(cf.constituent(Role::DirObj), Some(Constituent::Clause(_))));
        assert!(matches!(cf.constituent(Role::Subject), Some(Constituent::Np(_))));
    }

    #[test]
    fn complex_sentences() {
        let s5 = print_fs(&parse_fs(EXAMPLE_5).unwrap());
        let fs = parse_fs(&format!("((type conj) (conj and) (elements [{s5} {s5}]))")).unwrap();
        match validate(&fs).unwrap() {
            ComplexSentence::Conj { conj, elements } => {
                assert_eq!(conj, "and");
                assert_eq!(elements.len(), 2);
            }
            other => panic!("{other:?}"),
        }
        let fs = parse_fs(&format!("((type conj) (conj and) (elements [{s5}]))")).unwrap();
        assert_eq!(validate(&fs).unwrap_err().codes(), vec!["malformed"]);
        let fs = parse_fs(&format!("((type simple) (arg {s5}) (arg1 {s5}))")).unwrap();
        assert_eq!(validate(&fs).unwrap_err().codes(), vec!["unknown-feature"]);
        let fs = parse_fs(&format!("((type linked) (link-relation cause) (arg1 {s5}) (arg2 {s5}))")).unwrap();
        assert!(matches!(validate(&fs).unwrap(), ComplexSentence::Linked { .. }));
    }

    #[test]
    fn np_invariants() {
        let bad = parse_fs("((ref ((arg kitap))) (poss ((argument ben) (control ((drop +) (move +))))))").unwrap();
        assert_eq!(validate_np(&Value::Struct(bad)).unwrap_err().codes(), vec!["invalid-np"]);
        let bad = parse_fs("((ref ((arg kitap))) (modf ((ordinal ((position 0))))))").unwrap();
        assert_eq!(validate_np(&Value::Struct(bad)).unwrap_err().codes(), vec!["invalid-np"]);
        let np = validate_np(&Value::atom("kitap")).unwrap();
        assert_eq!(np.lookup("ref.arg").and_then(Value::as_token), Some("kitap"));
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let fs = ex5_with("(control ((background location)))");
        let once = validate(&fs).unwrap().to_fs();
        let twice = validate(&parse_fs(&print_fs(&once)).unwrap()).unwrap().to_fs();
        assert_eq!(once, twice);
        assert_eq!(print_fs(&once), print_fs(&twice));
    }
}
