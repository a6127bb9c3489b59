//! Agglutinative word-form generation.
//!
//! Generation runs in three steps: the tag sequence is checked against the
//! morphotactic templates, each abstract tag is mapped to an archiphonemic
//! suffix (`lAr`, `(y)I`, `DI`, ...), and the suffixes are realized left to
//! right against the phonological context of the growing word.
//!
//! Archiphoneme notation: `A` is a/e, `I` is ı/i/u/ü, `D` is d/t, and a
//! parenthesized segment is a buffer kept only where it is needed: `(y)`,
//! `(s)`, `(n)` after a vowel, `(I)` after a consonant.

use std::fmt;
use std::str::FromStr;

use crate::lexicon::{AoristClass, Category, LexEntry, LexFlags, Lexicon, LexiconError};

pub mod check;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MorphError {
    #[error("tag-order-violation: {tag} cannot follow {after}")]
    TagOrderViolation { tag: Tag, after: String },
    #[error("unsupported-combination: {0}")]
    UnsupportedCombination(String),
    #[error("unknown-tag '{0}'")]
    UnknownTag(String),
    #[error("syntax-error: {0}")]
    BadTagString(String),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
}

impl MorphError {
    pub fn code(&self) -> &'static str {
        match self {
            MorphError::TagOrderViolation { .. } => "tag-order-violation",
            MorphError::UnsupportedCombination(_) => "unsupported-combination",
            MorphError::UnknownTag(_) => "unknown-tag",
            MorphError::BadTagString(_) => "syntax-error",
            MorphError::Lexicon(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    Pl,
    P1sg,
    P2sg,
    P3sg,
    P1pl,
    P2pl,
    P3pl,
    Nom,
    Acc,
    Dat,
    Loc,
    Abl,
    Gen,
    Ins,
    Neg,
    Past,
    Prog,
    Fut,
    Aor,
    Nec,
    Opt,
    Cond,
    Imp,
    Abil,
    Pass,
    Caus,
    Refl,
    Recip,
    InfMa,
    InfIs,
    A1sg,
    A2sg,
    A3sg,
    A1pl,
    A2pl,
    A3pl,
    /// Ordinal numeral (-IncI).
    Ord,
}

const TAG_NAMES: [(Tag, &str); 37] = [
    (Tag::Pl, "PL"),
    (Tag::P1sg, "P1SG"),
    (Tag::P2sg, "P2SG"),
    (Tag::P3sg, "P3SG"),
    (Tag::P1pl, "P1PL"),
    (Tag::P2pl, "P2PL"),
    (Tag::P3pl, "P3PL"),
    (Tag::Nom, "NOM"),
    (Tag::Acc, "ACC"),
    (Tag::Dat, "DAT"),
    (Tag::Loc, "LOC"),
    (Tag::Abl, "ABL"),
    (Tag::Gen, "GEN"),
    (Tag::Ins, "INS"),
    (Tag::Neg, "NEG"),
    (Tag::Past, "PAST"),
    (Tag::Prog, "PROG"),
    (Tag::Fut, "FUT"),
    (Tag::Aor, "AOR"),
    (Tag::Nec, "NEC"),
    (Tag::Opt, "OPT"),
    (Tag::Cond, "COND"),
    (Tag::Imp, "IMP"),
    (Tag::Abil, "ABIL"),
    (Tag::Pass, "PASS"),
    (Tag::Caus, "CAUS"),
    (Tag::Refl, "REFL"),
    (Tag::Recip, "RECIP"),
    (Tag::InfMa, "INF-MA"),
    (Tag::InfIs, "INF-IS"),
    (Tag::A1sg, "A1SG"),
    (Tag::A2sg, "A2SG"),
    (Tag::A3sg, "A3SG"),
    (Tag::A1pl, "A1PL"),
    (Tag::A2pl, "A2PL"),
    (Tag::A3pl, "A3PL"),
    (Tag::Ord, "ORD"),
];

impl Tag {
    pub fn name(self) -> &'static str {
        TAG_NAMES.iter().find(|(t, _)| *t == self).map(|(_, n)| *n).unwrap_or("?")
    }

    fn class(self) -> TagClass {
        use Tag::*;
        match self {
            Pl => TagClass::Number,
            P1sg | P2sg | P3sg | P1pl | P2pl | P3pl => TagClass::Poss,
            Nom | Acc | Dat | Loc | Abl | Gen | Ins => TagClass::Case,
            Neg => TagClass::Neg,
            Past | Prog | Fut | Aor | Nec | Opt | Cond | Imp => TagClass::TenseMood,
            Abil => TagClass::Abil,
            Pass | Caus | Refl | Recip => TagClass::Voice,
            InfMa | InfIs => TagClass::Inf,
            A1sg | A2sg | A3sg | A1pl | A2pl | A3pl => TagClass::Agr,
            Ord => TagClass::Ord,
        }
    }

    fn is_verbal(self) -> bool {
        matches!(
            self.class(),
            TagClass::Neg | TagClass::TenseMood | TagClass::Abil | TagClass::Voice | TagClass::Inf | TagClass::Agr
        )
    }

    pub fn is_case(self) -> bool {
        self.class() == TagClass::Case
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tag {
    type Err = MorphError;

    fn from_str(s: &str) -> Result<Tag, MorphError> {
        let upper = s.trim().to_ascii_uppercase().replace('_', "-");
        let upper = match upper.as_str() {
            "INF" => "INF-MA".to_string(),
            "WITH" => "INS".to_string(),
            _ => upper,
        };
        TAG_NAMES
            .iter()
            .find(|(_, n)| *n == upper)
            .map(|(t, _)| *t)
            .ok_or_else(|| MorphError::UnknownTag(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TagClass {
    Number,
    Poss,
    Case,
    Neg,
    TenseMood,
    Abil,
    Voice,
    Inf,
    Agr,
    Ord,
}

/// Person and number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Agreement {
    pub person: u8,
    pub plural: bool,
}

impl Default for Agreement {
    fn default() -> Self {
        Agreement { person: 3, plural: false }
    }
}

impl Agreement {
    pub fn new(person: u8, plural: bool) -> Self {
        Agreement { person, plural }
    }

    pub fn is_default(self) -> bool {
        self == Agreement::default()
    }

    pub fn possessive(self) -> Tag {
        match (self.person, self.plural) {
            (1, false) => Tag::P1sg,
            (2, false) => Tag::P2sg,
            (1, true) => Tag::P1pl,
            (2, true) => Tag::P2pl,
            (_, true) => Tag::P3pl,
            _ => Tag::P3sg,
        }
    }

    pub fn verbal(self) -> Tag {
        match (self.person, self.plural) {
            (1, false) => Tag::A1sg,
            (2, false) => Tag::A2sg,
            (1, true) => Tag::A1pl,
            (2, true) => Tag::A2pl,
            (_, true) => Tag::A3pl,
            _ => Tag::A3sg,
        }
    }

    fn of_agr_tag(tag: Tag) -> Option<Agreement> {
        Some(match tag {
            Tag::A1sg => Agreement::new(1, false),
            Tag::A2sg => Agreement::new(2, false),
            Tag::A3sg => Agreement::new(3, false),
            Tag::A1pl => Agreement::new(1, true),
            Tag::A2pl => Agreement::new(2, true),
            Tag::A3pl => Agreement::new(3, true),
            _ => return None,
        })
    }
}

impl FromStr for Agreement {
    type Err = String;

    /// `1sg`, `3pl`, ...; a trailing `-possessed` marker is ignored.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.to_lowercase();
        let core = s.split('-').next().unwrap_or("");
        let bytes = core.as_bytes();
        if bytes.len() != 3 || !(b'1'..=b'3').contains(&bytes[0]) {
            return Err(format!("bad agreement '{s}'"));
        }
        let plural = match &core[1..] {
            "sg" => false,
            "pl" => true,
            _ => return Err(format!("bad agreement '{s}'")),
        };
        Ok(Agreement::new(bytes[0] - b'0', plural))
    }
}

impl fmt::Display for Agreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.person, if self.plural { "pl" } else { "sg" })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphRequest {
    pub root: String,
    pub tags: Vec<Tag>,
}

impl MorphRequest {
    pub fn new(root: &str, tags: &[Tag]) -> Self {
        MorphRequest { root: root.to_string(), tags: tags.to_vec() }
    }
}

impl FromStr for MorphRequest {
    type Err = MorphError;

    /// `root+TAG+TAG...`, tags case-insensitive.
    fn from_str(s: &str) -> Result<Self, MorphError> {
        let mut parts = s.trim().split('+');
        let root = parts.next().unwrap_or("").trim();
        if root.is_empty() {
            return Err(MorphError::BadTagString(format!("'{s}' has no root")));
        }
        let tags = parts.map(str::parse).collect::<Result<Vec<Tag>, _>>()?;
        Ok(MorphRequest { root: root.to_string(), tags })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frontness {
    Front,
    Back,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoundClass {
    Vowel,
    VoicedConsonant,
    VoicelessConsonant,
}

/// Phonological state at the right edge of a partial word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhonContext {
    pub last_vowel: Option<char>,
    pub final_sound: Option<SoundClass>,
    pub harmony_override: Option<Frontness>,
}

impl PhonContext {
    pub fn of(word: &str) -> Self {
        let last_vowel = word.chars().rev().map(lower).find(|c| is_vowel(*c));
        let final_sound = word.chars().last().map(lower).map(|c| {
            if is_vowel(c) {
                SoundClass::Vowel
            } else if is_voiceless(c) {
                SoundClass::VoicelessConsonant
            } else {
                SoundClass::VoicedConsonant
            }
        });
        PhonContext { last_vowel, final_sound, harmony_override: None }
    }

    fn front(&self) -> bool {
        match self.harmony_override {
            Some(f) => f == Frontness::Front,
            None => self.last_vowel.map(is_front).unwrap_or(true),
        }
    }

    fn rounded(&self) -> bool {
        self.last_vowel.map(is_rounded).unwrap_or(false)
    }

    fn resolve_a(&self) -> char {
        if self.front() { 'e' } else { 'a' }
    }

    fn resolve_i(&self) -> char {
        match (self.front(), self.rounded()) {
            (true, false) => 'i',
            (true, true) => 'ü',
            (false, false) => 'ı',
            (false, true) => 'u',
        }
    }
}

pub(crate) fn lower(c: char) -> char {
    match c {
        'I' => 'ı',
        'İ' => 'i',
        _ => c.to_lowercase().next().unwrap_or(c),
    }
}

pub fn is_vowel(c: char) -> bool {
    matches!(lower(c), 'a' | 'e' | 'ı' | 'i' | 'o' | 'ö' | 'u' | 'ü' | 'â' | 'î' | 'û')
}

pub fn is_front(c: char) -> bool {
    matches!(lower(c), 'e' | 'i' | 'ö' | 'ü' | 'î')
}

pub fn is_rounded(c: char) -> bool {
    matches!(lower(c), 'o' | 'ö' | 'u' | 'ü' | 'û')
}

pub fn is_voiceless(c: char) -> bool {
    matches!(lower(c), 'ç' | 'f' | 'h' | 'k' | 'p' | 's' | 'ş' | 't')
}

fn vowel_count(s: &str) -> usize {
    s.chars().filter(|c| is_vowel(*c)).count()
}

/// Suffix chosen by morpheme selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suffix {
    pub label: String,
    pub form: SuffixForm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SuffixForm {
    /// Archiphonemic template; `softens` marks a final k that voices
    /// before a vowel (-AcAk).
    Template { template: &'static str, softens: bool },
    /// Passive: n after a vowel, In after l, Il elsewhere.
    Passive,
    /// Causative: t after a vowel-final stem, DIr elsewhere.
    Causative,
}

impl Suffix {
    fn new(label: impl Into<String>, template: &'static str) -> Self {
        Suffix { label: label.into(), form: SuffixForm::Template { template, softens: false } }
    }

    pub fn template(&self) -> &'static str {
        match self.form {
            SuffixForm::Template { template, .. } => template,
            SuffixForm::Passive => "Il",
            SuffixForm::Causative => "DIr",
        }
    }
}

impl fmt::Display for Suffix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.template())
    }
}

fn order_violation(tag: Tag, prev: Option<Tag>) -> MorphError {
    MorphError::TagOrderViolation {
        tag,
        after: prev.map(|t| t.name().to_string()).unwrap_or_else(|| "the stem".into()),
    }
}

/// Checks the tag sequence against the nominal, verbal and nominalized
/// morphotactic templates.
pub fn check_tags(tags: &[Tag]) -> Result<(), MorphError> {
    let verbal = tags.iter().any(|t| t.is_verbal());
    let inf_at = tags.iter().position(|t| t.class() == TagClass::Inf);
    let mut last: Option<(u8, Tag)> = None;
    let mut tense: Option<Tag> = None;
    for (i, &tag) in tags.iter().enumerate() {
        let after_inf = inf_at.is_some_and(|p| i > p);
        let rank = match tag.class() {
            TagClass::Ord => 0,
            TagClass::Voice => match tag {
                Tag::Refl | Tag::Recip => 1,
                Tag::Caus => 2,
                _ => 3,
            },
            TagClass::Abil => 4,
            TagClass::Neg => 5,
            TagClass::Inf => {
                if tense.is_some() {
                    return Err(MorphError::UnsupportedCombination(format!("{tag} after a tense")));
                }
                6
            }
            TagClass::TenseMood => match tense {
                None if inf_at.is_some() && !after_inf => {
                    return Err(MorphError::UnsupportedCombination(format!("{tag} with a nominalizer")))
                }
                None if after_inf => return Err(order_violation(tag, last.map(|l| l.1))),
                None => {
                    tense = Some(tag);
                    6
                }
                Some(Tag::Prog | Tag::Fut | Tag::Aor | Tag::Nec | Tag::Past) if matches!(tag, Tag::Past | Tag::Cond) => 7,
                Some(prev) => {
                    return Err(MorphError::UnsupportedCombination(format!("{tag} after {prev}")))
                }
            },
            TagClass::Agr => {
                if after_inf {
                    return Err(MorphError::UnsupportedCombination(format!(
                        "{tag} on a nominalized verb; use a possessive"
                    )));
                }
                8
            }
            TagClass::Number | TagClass::Poss | TagClass::Case if verbal => {
                if inf_at.is_none() {
                    return Err(MorphError::UnsupportedCombination(format!("{tag} on a finite verb")));
                }
                if !after_inf {
                    return Err(MorphError::TagOrderViolation {
                        tag: tags[inf_at.unwrap()],
                        after: tag.name().into(),
                    });
                }
                match tag.class() {
                    TagClass::Number => 7,
                    TagClass::Poss => 8,
                    _ => 9,
                }
            }
            TagClass::Number => 1,
            TagClass::Poss => 2,
            TagClass::Case => 3,
        };
        if let Some((prev_rank, prev)) = last {
            if rank <= prev_rank {
                return Err(order_violation(tag, Some(prev)));
            }
        }
        last = Some((rank, tag));
    }
    if tags.contains(&Tag::Imp) {
        if let Some(a) = tags.iter().find_map(|t| Agreement::of_agr_tag(*t)) {
            if a.person == 1 {
                return Err(MorphError::UnsupportedCombination("imperative with first person".into()));
            }
        }
    }
    Ok(())
}

/// Maps abstract tags to archiphonemic suffixes. `root` is the lexical
/// entry being inflected.
pub fn select_morphemes(root: &LexEntry, tags: &[Tag]) -> Result<Vec<Suffix>, MorphError> {
    check_tags(tags)?;
    let mut out: Vec<Suffix> = Vec::new();
    let agr = tags.iter().find_map(|t| Agreement::of_agr_tag(*t));
    let root_vowel_final = root.lemma.chars().last().is_some_and(is_vowel);
    let mut prev: Option<Tag> = None;
    let mut tense: Option<Tag> = None;
    let mut skip_agr = false;
    for (i, &tag) in tags.iter().enumerate() {
        let next = tags.get(i + 1).copied();
        let after_p3 = matches!(prev, Some(Tag::P3sg | Tag::P3pl))
            || (out.is_empty() && prev.is_none() && root.flags.pronominal_n);
        let suffix = match tag {
            Tag::Nom | Tag::A3sg => None,
            Tag::Pl => Some(Suffix::new("PL", "lAr")),
            Tag::P1sg => Some(Suffix::new("P1SG", "(I)m")),
            Tag::P2sg => Some(Suffix::new("P2SG", "(I)n")),
            Tag::P3sg => Some(Suffix::new("P3SG", "(s)I")),
            Tag::P1pl => Some(Suffix::new("P1PL", "(I)mIz")),
            Tag::P2pl => Some(Suffix::new("P2PL", "(I)nIz")),
            Tag::P3pl if prev == Some(Tag::Pl) => Some(Suffix::new("P3PL", "I")),
            Tag::P3pl => Some(Suffix::new("P3PL", "lArI")),
            Tag::Acc => Some(Suffix::new("ACC", if after_p3 { "nI" } else { "(y)I" })),
            Tag::Dat => Some(Suffix::new("DAT", if after_p3 { "nA" } else { "(y)A" })),
            Tag::Loc => Some(Suffix::new("LOC", if after_p3 { "nDA" } else { "DA" })),
            Tag::Abl => Some(Suffix::new("ABL", if after_p3 { "nDAn" } else { "DAn" })),
            Tag::Gen => Some(Suffix::new("GEN", if after_p3 { "nIn" } else { "(n)In" })),
            Tag::Ins => Some(Suffix::new("INS", "(y)lA")),
            Tag::Ord => Some(Suffix::new("ORD", "(I)ncI")),
            Tag::Refl => Some(Suffix::new("REFL", "(I)n")),
            Tag::Recip => Some(Suffix::new("RECIP", "(I)ş")),
            Tag::Pass => Some(Suffix { label: "PASS".into(), form: SuffixForm::Passive }),
            Tag::Caus => Some(Suffix { label: "CAUS".into(), form: SuffixForm::Causative }),
            Tag::Abil if next == Some(Tag::Neg) => Some(Suffix::new("ABIL", "(y)A")),
            Tag::Abil => Some(Suffix::new("ABIL", "(y)Abil")),
            Tag::Neg => Some(Suffix::new("NEG", "mA")),
            Tag::InfMa => Some(Suffix::new("INF-MA", "mA")),
            Tag::InfIs => Some(Suffix::new("INF-IS", "(y)Iş")),
            Tag::Prog => Some(Suffix::new("PROG", "Iyor")),
            Tag::Fut => Some(Suffix {
                label: "FUT".into(),
                form: SuffixForm::Template { template: "(y)AcAk", softens: true },
            }),
            Tag::Nec => Some(Suffix::new("NEC", "mAlI")),
            Tag::Past if tense.is_some() => Some(Suffix::new("PAST", "(y)DI")),
            Tag::Past => Some(Suffix::new("PAST", "DI")),
            Tag::Cond if tense.is_some() => Some(Suffix::new("COND", "(y)sA")),
            Tag::Cond => Some(Suffix::new("COND", "sA")),
            Tag::Aor if prev == Some(Tag::Neg) => {
                if matches!(agr, Some(a) if a.person == 1) {
                    None
                } else {
                    Some(Suffix::new("AOR", "z"))
                }
            }
            Tag::Aor => {
                let template = if !out.is_empty() {
                    "Ir"
                } else if root_vowel_final {
                    "r"
                } else {
                    match root.flags.aorist {
                        Some(AoristClass::Ar) => "Ar",
                        Some(AoristClass::Ir) => "Ir",
                        None if vowel_count(&root.lemma) <= 1 => "Ar",
                        None => "Ir",
                    }
                };
                Some(Suffix::new("AOR", template))
            }
            Tag::Opt => {
                skip_agr = true;
                let a = agr.unwrap_or_default();
                Some(Suffix::new(
                    format!("OPT+{}", a.verbal()),
                    match (a.person, a.plural) {
                        (1, false) => "(y)AyIm",
                        (2, false) => "(y)AsIn",
                        (1, true) => "(y)AlIm",
                        (2, true) => "(y)AsInIz",
                        (_, true) => "(y)AlAr",
                        _ => "(y)A",
                    },
                ))
            }
            Tag::Imp => {
                skip_agr = true;
                let a = agr.unwrap_or(Agreement::new(2, false));
                match (a.person, a.plural) {
                    (2, false) => None,
                    (2, true) => Some(Suffix::new("IMP+A2PL", "(y)In")),
                    (_, false) => Some(Suffix::new("IMP+A3SG", "sIn")),
                    (_, true) => Some(Suffix::new("IMP+A3PL", "sInlAr")),
                }
            }
            Tag::A1sg | Tag::A2sg | Tag::A1pl | Tag::A2pl | Tag::A3pl if skip_agr => None,
            Tag::A1sg | Tag::A2sg | Tag::A1pl | Tag::A2pl | Tag::A3pl => {
                let k_paradigm = matches!(tense, Some(Tag::Past | Tag::Cond))
                    || matches!(tags.get(i.wrapping_sub(1)), Some(Tag::Past | Tag::Cond));
                let neg_aor_1sg = prev == Some(Tag::Aor) && tags.contains(&Tag::Neg) && tag == Tag::A1sg;
                let template = match tag {
                    _ if neg_aor_1sg => "m",
                    Tag::A1sg if k_paradigm => "m",
                    Tag::A2sg if k_paradigm => "n",
                    Tag::A1pl if k_paradigm => "k",
                    Tag::A2pl if k_paradigm => "nIz",
                    Tag::A1sg => "(y)Im",
                    Tag::A2sg => "sIn",
                    Tag::A1pl => "(y)Iz",
                    Tag::A2pl => "sInIz",
                    _ => "lAr",
                };
                Some(Suffix::new(tag.name(), template))
            }
        };
        if tag.class() == TagClass::TenseMood {
            // the second tense slot (copula) decides the agreement paradigm
            tense = Some(if tense.is_some() && matches!(tag, Tag::Past | Tag::Cond) { tag } else { tense.unwrap_or(tag) });
        }
        if let Some(s) = suffix {
            out.push(s);
        }
        prev = Some(tag);
    }
    Ok(out)
}

/// A realized suffix, with the template it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub label: String,
    pub template: String,
    pub surface: String,
}

/// A generated word together with its morpheme segmentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordForm {
    pub root: String,
    /// Root as it surfaces (after softening or vowel drop).
    pub stem: String,
    pub suffixes: Vec<Segment>,
    pub proper_noun: bool,
    pub harmony_override: Option<Frontness>,
    pub irregular: bool,
    pub pronominal_n: bool,
}

impl WordForm {
    pub fn text(&self) -> String {
        let mut s = self.stem.clone();
        let mut apostrophe = self.proper_noun;
        for seg in &self.suffixes {
            if seg.surface.is_empty() {
                continue;
            }
            if apostrophe {
                s.push('\'');
                apostrophe = false;
            }
            s.push_str(&seg.surface);
        }
        s
    }

    fn fixed(root: &str, text: &str) -> WordForm {
        WordForm {
            root: root.to_string(),
            stem: text.to_string(),
            suffixes: Vec::new(),
            proper_noun: false,
            harmony_override: None,
            irregular: true,
            pronominal_n: false,
        }
    }
}

impl fmt::Display for WordForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

fn soften(c: char, before: Option<char>) -> char {
    match c {
        'p' => 'b',
        'ç' => 'c',
        't' => 'd',
        'k' if before == Some('n') => 'g',
        'k' => 'ğ',
        other => other,
    }
}

/// Realizes `suffixes` on `root_form`, applying harmony, voicing,
/// softening, buffers and the pre-`Iyor` vowel drop.
pub fn surface(root_form: &str, suffixes: &[Suffix], flags: &LexFlags, proper_noun: bool) -> WordForm {
    let mut stem: Vec<char> = root_form.chars().collect();
    let mut done: Vec<(Segment, Vec<char>)> = Vec::new();
    // whether the right-most non-empty piece may voice its final consonant
    let mut soft_edge = flags.soften;
    let mut first = true;

    for suffix in suffixes {
        let current: String =
            stem.iter().chain(done.iter().flat_map(|(_, c)| c.iter())).collect();
        let ctx = PhonContext::of(&current);
        let ends_vowel = ctx.final_sound == Some(SoundClass::Vowel);
        let last_char = current.chars().last().map(lower);
        let template: &str = match suffix.form {
            SuffixForm::Template { template, .. } => template,
            SuffixForm::Passive if ends_vowel => "n",
            SuffixForm::Passive if last_char == Some('l') => "In",
            SuffixForm::Passive => "Il",
            SuffixForm::Causative if ends_vowel => "t",
            SuffixForm::Causative => "DIr",
        };

        let mut body = template;
        let mut kept_buffer = None;
        if let Some(rest) = template.strip_prefix('(') {
            let close = rest.find(')').expect("buffer closes");
            let buffer = &rest[..close];
            body = &rest[close + 1..];
            let keep = if buffer == "I" { !ends_vowel } else { ends_vowel };
            if keep {
                kept_buffer = Some(buffer);
            }
        }
        // pre-Iyor vowel drop: the stem-final vowel yields to the I
        if body.starts_with("Iyor") && ends_vowel {
            drop_last_char(&mut stem, &mut done);
        }

        let mut ctx = PhonContext::of(
            &stem.iter().chain(done.iter().flat_map(|(_, c)| c.iter())).collect::<String>(),
        );
        if first {
            ctx.harmony_override = flags.harmony_override;
        }
        let mut prev = stem.iter().chain(done.iter().flat_map(|(_, c)| c.iter())).last().copied();
        let mut realized: Vec<char> = Vec::new();
        let full: String = kept_buffer.unwrap_or("").to_string() + body;
        for ch in full.chars() {
            let out = match ch {
                'A' => ctx.resolve_a(),
                'I' => ctx.resolve_i(),
                'D' => {
                    if prev.is_some_and(is_voiceless) {
                        't'
                    } else {
                        'd'
                    }
                }
                other => other,
            };
            if is_vowel(out) {
                ctx.last_vowel = Some(out);
                ctx.harmony_override = None;
            }
            prev = Some(out);
            realized.push(out);
        }

        if realized.first().is_some_and(|c| is_vowel(*c)) {
            if first && flags.vowel_drop && done.is_empty() {
                if let Some(pos) = stem.iter().rposition(|c| is_vowel(*c)) {
                    if pos + 1 < stem.len() && pos > 0 {
                        stem.remove(pos);
                    }
                }
            }
            if soft_edge {
                soften_edge(&mut stem, &mut done);
            }
        }
        if !realized.is_empty() {
            soft_edge = matches!(suffix.form, SuffixForm::Template { softens: true, .. });
            first = false;
        }
        let seg = Segment {
            label: suffix.label.clone(),
            template: template.to_string(),
            surface: realized.iter().collect(),
        };
        done.push((seg, realized));
    }

    let mut suffixes_out = Vec::with_capacity(done.len());
    for (mut seg, chars) in done {
        seg.surface = chars.into_iter().collect();
        suffixes_out.push(seg);
    }
    WordForm {
        root: root_form.to_string(),
        stem: stem.into_iter().collect(),
        suffixes: suffixes_out,
        proper_noun,
        harmony_override: flags.harmony_override,
        irregular: false,
        pronominal_n: flags.pronominal_n,
    }
}

fn drop_last_char(stem: &mut Vec<char>, done: &mut [(Segment, Vec<char>)]) {
    if let Some((_, chars)) = done.iter_mut().rev().find(|(_, c)| !c.is_empty()) {
        chars.pop();
    } else {
        stem.pop();
    }
}

fn soften_edge(stem: &mut [char], done: &mut [(Segment, Vec<char>)]) {
    let target: &mut [char] = match done.iter_mut().rev().find(|(_, c)| !c.is_empty()) {
        Some((_, chars)) => chars,
        None => stem,
    };
    let n = target.len();
    if n == 0 {
        return;
    }
    let before = if n >= 2 { Some(target[n - 2]) } else { None };
    target[n - 1] = soften(target[n - 1], before);
}

/// Full generation for one word: lexicon lookup, irregular forms,
/// morpheme selection and surface realization.
pub fn generate(lex: &Lexicon, req: &MorphRequest) -> Result<WordForm, MorphError> {
    let verbal = req.tags.iter().any(|t| t.is_verbal());
    let entry = if verbal {
        lex.lookup(&req.root, Category::Verb)?
    } else {
        lex.lookup_any(&req.root, &Category::NOMINAL)
            .or_else(|_| lex.lookup(&req.root, Category::Verb))?
    };
    generate_entry(entry, &req.tags)
}

pub fn generate_entry(entry: &LexEntry, tags: &[Tag]) -> Result<WordForm, MorphError> {
    check_tags(tags)?;
    let significant: Vec<Tag> =
        tags.iter().copied().filter(|t| !matches!(t, Tag::Nom | Tag::A3sg)).collect();
    if let Some(form) = entry.irregular_form(&significant).or_else(|| entry.irregular_form(tags)) {
        return Ok(WordForm::fixed(&entry.lemma, form));
    }
    let suffixes = select_morphemes(entry, tags)?;
    Ok(surface(&entry.lemma, &suffixes, &entry.flags, entry.is_proper()))
}

/// The yes-no question particle, harmonized with the preceding word.
pub fn harmonize_particle(prev_word: &str) -> String {
    let ctx = PhonContext::of(prev_word);
    format!("m{}", ctx.resolve_i())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon;

    fn lex() -> Lexicon {
        lexicon::shipped()
    }

    fn gen(s: &str) -> String {
        generate(&lex(), &s.parse().unwrap()).unwrap().text()
    }

    #[test]
    fn glossed_forms() {
        let cases = [
            ("kitap+ACC", "kitabı"),
            ("ev+ABL", "evden"),
            ("okul+DAT", "okula"),
            ("masa+LOC", "masada"),
            ("otobüs+INS", "otobüsle"),
            ("dakika+LOC", "dakikada"),
            ("bırak+PAST", "bıraktı"),
            ("git+PAST", "gitti"),
            ("gör+NEG+PAST+A1SG", "görmedim"),
            ("Ayşe+GEN", "Ayşe'nin"),
            ("Ali+GEN", "Ali'nin"),
            ("gel+INF-IS+P3SG+ACC", "gelişini"),
            ("gel+INF-MA+P3SG", "gelmesi"),
            ("bitir+INF-MA+P1PL+ACC", "bitirmemizi"),
            ("kolaylaştır+PAST", "kolaylaştırdı"),
            ("kitap+P1SG", "kitabım"),
            ("ben+GEN", "benim"),
            ("biz+GEN", "bizim"),
            ("iş+ACC", "işi"),
            ("bura+DAT", "buraya"),
            ("masa+P3SG", "masası"),
            ("kitap", "kitap"),
        ];
        for (req, want) in cases {
            assert_eq!(gen(req), want, "{req}");
        }
    }

    #[test]
    fn verbal_paradigms() {
        let cases = [
            ("gel+PROG+A1SG", "geliyorum"),
            ("bekle+PROG", "bekliyor"),
            ("oku+PROG+A3PL", "okuyorlar"),
            ("gel+NEG+PROG", "gelmiyor"),
            ("gel+FUT+A1SG", "geleceğim"),
            ("git+FUT", "gidecek"),
            ("gel+PROG+PAST", "geliyordu"),
            ("gel+FUT+PAST+A1SG", "gelecektim"),
            ("gel+NEC+A1SG", "gelmeliyim"),
            ("gel+COND+A1SG", "gelsem"),
            ("gel+OPT+A1PL", "gelelim"),
            ("gel+IMP+A2PL", "gelin"),
            ("gel+IMP", "gel"),
            ("gel+AOR", "gelir"),
            ("yaz+AOR", "yazar"),
            ("oku+AOR", "okur"),
            ("gel+NEG+AOR", "gelmez"),
            ("gel+NEG+AOR+A1SG", "gelmem"),
            ("gel+ABIL+PAST", "gelebildi"),
            ("gel+ABIL+NEG+PAST+A1SG", "gelemedim"),
            ("oku+ABIL+AOR", "okuyabilir"),
            ("yaz+PASS+PAST", "yazıldı"),
            ("oku+PASS+PAST", "okundu"),
            ("bil+PASS+AOR", "bilinir"),
            ("bekle+CAUS+PAST", "bekletti"),
            ("yap+CAUS+PAST", "yaptırdı"),
            ("gör+RECIP+PAST+A1PL", "görüştük"),
            ("git+PAST+A2PL", "gittiniz"),
        ];
        for (req, want) in cases {
            assert_eq!(gen(req), want, "{req}");
        }
    }

    #[test]
    fn nominal_paradigms() {
        let cases = [
            ("kitap+PL+P3PL", "kitapları"),
            ("kitap+P3PL", "kitapları"),
            ("ev+PL+LOC", "evlerde"),
            ("kitap+P3SG+LOC", "kitabında"),
            ("kitap+P3SG+INS", "kitabıyla"),
            ("masa+P3SG+ACC", "masasını"),
            ("saat+P1SG", "saatim"),
            ("saat+ABL", "saatten"),
            ("oğul+P3SG", "oğlu"),
            ("renk+ACC", "rengi"),
            ("bu+ACC", "bunu"),
            ("Ahmet+ACC", "Ahmet'i"),
            ("dört+ORD", "dördüncü"),
            ("iki+ORD", "ikinci"),
            ("üç+ORD", "üçüncü"),
            ("araba+INS", "arabayla"),
            ("ağaç+DAT", "ağaca"),
        ];
        for (req, want) in cases {
            assert_eq!(gen(req), want, "{req}");
        }
    }

    #[test]
    fn selection_shapes() {
        let l = lex();
        let kitap = l.lookup("kitap", Category::Noun).unwrap();
        let s = select_morphemes(kitap, &[Tag::Acc]).unwrap();
        assert_eq!(s.iter().map(Suffix::template).collect::<Vec<_>>(), vec!["(y)I"]);
        let gel = l.lookup("gel", Category::Verb).unwrap();
        let s = select_morphemes(gel, &[Tag::InfIs, Tag::P3sg, Tag::Acc]).unwrap();
        assert_eq!(s.iter().map(Suffix::template).collect::<Vec<_>>(), vec!["(y)Iş", "(s)I", "nI"]);
    }

    #[test]
    fn tag_errors() {
        let l = lex();
        let err = generate(&l, &"kitap+ACC+P3SG".parse().unwrap()).unwrap_err();
        assert_eq!(err.code(), "tag-order-violation");
        let err = generate(&l, &"gel+PAST+NEG".parse().unwrap()).unwrap_err();
        assert_eq!(err.code(), "tag-order-violation");
        let err = generate(&l, &"gel+PAST+ACC".parse().unwrap()).unwrap_err();
        assert_eq!(err.code(), "unsupported-combination");
        let err = generate(&l, &"gel+IMP+A1SG".parse().unwrap()).unwrap_err();
        assert_eq!(err.code(), "unsupported-combination");
        assert_eq!("kitap+FOO".parse::<MorphRequest>().unwrap_err().code(), "unknown-tag");
        let err = generate(&l, &"zzz+ACC".parse().unwrap()).unwrap_err();
        assert_eq!(err.code(), "missing-entry");
        assert!(check_tags(&[Tag::InfMa, Tag::P3sg, Tag::Acc]).is_ok());
        assert!(check_tags(&[Tag::Neg, Tag::InfMa, Tag::P1pl, Tag::Acc]).is_ok());
    }

    #[test]
    fn tag_string_is_case_insensitive() {
        let r: MorphRequest = "kitap+p1sg+nom".parse().unwrap();
        assert_eq!(r.tags, vec![Tag::P1sg, Tag::Nom]);
        assert_eq!(gen("kitap+p1sg+nom"), "kitabım");
    }

    #[test]
    fn particles() {
        assert_eq!(harmonize_particle("gitti"), "mi");
        assert_eq!(harmonize_particle("bıraktı"), "mı");
        assert_eq!(harmonize_particle("bu"), "mu");
        assert_eq!(harmonize_particle("gördü"), "mü");
    }

    #[test]
    fn agreement_parsing() {
        assert_eq!("1sg".parse::<Agreement>().unwrap(), Agreement::new(1, false));
        assert_eq!("1sg-possessed".parse::<Agreement>().unwrap(), Agreement::new(1, false));
        assert_eq!("3PL".parse::<Agreement>().unwrap(), Agreement::new(3, true));
        assert!("4sg".parse::<Agreement>().is_err());
    }
    proptest::proptest! {
        #[test]
        fn nominal_forms_pass_validators(
            root in 0usize..64,
            pl in proptest::bool::ANY,
            poss in 0usize..7,
            case in 0usize..8,
        ) {
            let l = lex();
            let nouns: Vec<&LexEntry> =
                l.entries().iter().filter(|e| matches!(e.category, Category::Noun | Category::ProperNoun)).collect();
            let entry = nouns[root % nouns.len()];
            let mut tags = Vec::new();
            if pl { tags.push(Tag::Pl); }
            let p = [Tag::P1sg, Tag::P2sg, Tag::P3sg, Tag::P1pl, Tag::P2pl, Tag::P3pl];
            if poss > 0 { tags.push(p[poss - 1]); }
            let c = [Tag::Nom, Tag::Acc, Tag::Dat, Tag::Loc, Tag::Abl, Tag::Gen, Tag::Ins];
            if case > 0 { tags.push(c[case - 1]); }
            let form = generate_entry(entry, &tags).unwrap();
            let bad = check::check_all(&form);
            proptest::prop_assert!(bad.is_empty(), "{:?}", bad);
            let again = generate_entry(entry, &tags).unwrap();
            proptest::prop_assert_eq!(form, again);
        }

        #[test]
        fn verbal_forms_pass_validators(
            root in 0usize..64,
            voice in 0usize..3,
            abil in proptest::bool::ANY,
            neg in proptest::bool::ANY,
            tense in 0usize..6,
            agr in 0usize..6,
        ) {
            let l = lex();
            let verbs: Vec<&LexEntry> = l.entries().iter().filter(|e| e.category == Category::Verb).collect();
            let entry = verbs[root % verbs.len()];
            let mut tags = Vec::new();
            match voice { 1 => tags.push(Tag::Caus), 2 => tags.push(Tag::Pass), _ => {} }
            if abil { tags.push(Tag::Abil); }
            if neg { tags.push(Tag::Neg); }
            tags.push([Tag::Past, Tag::Prog, Tag::Fut, Tag::Aor, Tag::Nec, Tag::Cond][tense]);
            tags.push([Tag::A1sg, Tag::A2sg, Tag::A3sg, Tag::A1pl, Tag::A2pl, Tag::A3pl][agr]);
            let form = generate_entry(entry, &tags).unwrap();
            let bad = check::check_all(&form);
            proptest::prop_assert!(bad.is_empty(), "{} {:?}", form, bad);
        }
    }
}
