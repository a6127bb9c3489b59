//! Lexical knowledge: roots with phonological and positional flags,
//! irregular forms, wh pro-forms and connectives.
//!
//! Entry file syntax, one entry per top-level list:
//!
//! ```text
//! (entry "kitap" (cat noun) (flags (soften +)))
//! (entry "ben" (cat pronoun) (agr 1sg) (irregular (("GEN") "benim") (("DAT") "bana")))
//! (entry "nereye" (cat wh) (wh-role goal))
//! (entry "ve" (cat conj) (relation and) (connective "{1} ve {2}"))
//! ```

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::morph::{Agreement, Frontness, Tag};
use crate::sexpr::{self, Pos, Sexp};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexiconError {
    #[error("syntax-error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("duplicate-entry '{lemma}' ({category}) at {pos}")]
    DuplicateEntry { lemma: String, category: Category, pos: Pos },
    #[error("missing-entry '{lemma}' ({category})")]
    MissingEntry { lemma: String, category: String },
    #[error("missing-entry: no wh pro-form for role '{0}'")]
    MissingWh(String),
}

impl LexiconError {
    pub fn code(&self) -> &'static str {
        match self {
            LexiconError::Syntax { .. } => "syntax-error",
            LexiconError::DuplicateEntry { .. } => "duplicate-entry",
            LexiconError::MissingEntry { .. } | LexiconError::MissingWh(_) => "missing-entry",
        }
    }
}

impl From<sexpr::SyntaxError> for LexiconError {
    fn from(e: sexpr::SyntaxError) -> Self {
        LexiconError::Syntax { pos: e.pos, message: e.message }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    Noun,
    ProperNoun,
    Pronoun,
    Verb,
    Adj,
    Det,
    Demons,
    Conj,
    Wh,
    Adverb,
}

impl Category {
    pub const NOMINAL: [Category; 8] = [
        Category::ProperNoun,
        Category::Noun,
        Category::Pronoun,
        Category::Adverb,
        Category::Adj,
        Category::Det,
        Category::Demons,
        Category::Wh,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Noun => "noun",
            Category::ProperNoun => "proper-noun",
            Category::Pronoun => "pronoun",
            Category::Verb => "verb",
            Category::Adj => "adj",
            Category::Det => "det",
            Category::Demons => "demons",
            Category::Conj => "conj",
            Category::Wh => "wh",
            Category::Adverb => "adverb",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.to_lowercase().as_str() {
            "noun" => Category::Noun,
            "proper-noun" => Category::ProperNoun,
            "pronoun" => Category::Pronoun,
            "verb" => Category::Verb,
            "adj" => Category::Adj,
            "det" => Category::Det,
            "demons" => Category::Demons,
            "conj" => Category::Conj,
            "wh" => Category::Wh,
            "adverb" => Category::Adverb,
            other => return Err(format!("unknown category '{other}'")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nominalizer {
    Ma,
    Is,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AoristClass {
    Ar,
    Ir,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LexFlags {
    /// Final p/ç/t/k voices before a vowel-initial suffix.
    pub soften: bool,
    pub harmony_override: Option<Frontness>,
    pub nominalizer: Option<Nominalizer>,
    /// Position class for determiners and demonstratives.
    pub det_position: Option<String>,
    /// Last stem vowel drops before a vowel-initial suffix (oğul → oğlu).
    pub vowel_drop: bool,
    /// Takes the pronominal n before case suffixes (bu → bunu).
    pub pronominal_n: bool,
    pub aorist: Option<AoristClass>,
    /// The indefinite article (bir).
    pub article: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subcat {
    pub required_roles: Vec<String>,
    pub obligatory_object: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexEntry {
    pub lemma: String,
    pub category: Category,
    pub flags: LexFlags,
    pub irregular: Vec<(Vec<Tag>, String)>,
    pub subcat: Subcat,
    pub agr: Option<Agreement>,
    pub wh_role: Option<String>,
    pub relation: Option<String>,
    pub connective: Option<String>,
}

impl LexEntry {
    pub fn new(lemma: &str, category: Category) -> Self {
        LexEntry {
            lemma: lemma.to_string(),
            category,
            flags: LexFlags::default(),
            irregular: Vec::new(),
            subcat: Subcat::default(),
            agr: None,
            wh_role: None,
            relation: None,
            connective: None,
        }
    }

    pub fn irregular_form(&self, tags: &[Tag]) -> Option<&str> {
        self.irregular.iter().find(|(t, _)| t == tags).map(|(_, s)| s.as_str())
    }

    pub fn is_proper(&self) -> bool {
        self.category == Category::ProperNoun
    }
}

fn key(lemma: &str) -> String {
    lemma.trim_start_matches('#').to_lowercase()
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: Vec<LexEntry>,
    index: HashMap<(String, Category), usize>,
    wh: HashMap<String, usize>,
    relations: HashMap<String, usize>,
}

impl Lexicon {
    pub fn load(text: &str) -> Result<Lexicon, LexiconError> {
        let mut lex = Lexicon::default();
        for item in sexpr::read_all(text)? {
            let pos = item.pos();
            let entry = parse_entry(&item)?;
            lex.add(entry).map_err(|e| match e {
                LexiconError::DuplicateEntry { lemma, category, .. } => {
                    LexiconError::DuplicateEntry { lemma, category, pos }
                }
                other => other,
            })?;
        }
        Ok(lex)
    }

    pub fn add(&mut self, entry: LexEntry) -> Result<(), LexiconError> {
        let k = (key(&entry.lemma), entry.category);
        if self.index.contains_key(&k) {
            return Err(LexiconError::DuplicateEntry {
                lemma: entry.lemma,
                category: entry.category,
                pos: Pos::default(),
            });
        }
        let idx = self.entries.len();
        if let Some(role) = &entry.wh_role {
            self.wh.entry(role.clone()).or_insert(idx);
        }
        if let Some(rel) = &entry.relation {
            self.relations.entry(rel.clone()).or_insert(idx);
        }
        self.index.insert(k, idx);
        self.entries.push(entry);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn lookup(&self, lemma: &str, category: Category) -> Result<&LexEntry, LexiconError> {
        self.index
            .get(&(key(lemma), category))
            .map(|&i| &self.entries[i])
            .ok_or_else(|| LexiconError::MissingEntry {
                lemma: lemma.to_string(),
                category: category.to_string(),
            })
    }

    /// First entry for `lemma` among `categories`, in the order given.
    pub fn lookup_any(&self, lemma: &str, categories: &[Category]) -> Result<&LexEntry, LexiconError> {
        let k = key(lemma);
        categories
            .iter()
            .find_map(|&c| self.index.get(&(k.clone(), c)))
            .map(|&i| &self.entries[i])
            .ok_or_else(|| LexiconError::MissingEntry {
                lemma: lemma.to_string(),
                category: categories.iter().map(|c| c.as_str()).collect::<Vec<_>>().join("|"),
            })
    }

    pub fn lookup_wh(&self, role: &str) -> Result<&LexEntry, LexiconError> {
        self.wh
            .get(role)
            .map(|&i| &self.entries[i])
            .ok_or_else(|| LexiconError::MissingWh(role.to_string()))
    }

    pub fn lookup_relation(&self, relation: &str) -> Option<&LexEntry> {
        self.relations.get(&relation.to_lowercase()).map(|&i| &self.entries[i])
    }
}

fn syntax(pos: Pos, message: impl Into<String>) -> LexiconError {
    LexiconError::Syntax { pos, message: message.into() }
}

fn token(s: &Sexp) -> Result<String, LexiconError> {
    match s {
        Sexp::Atom(a, _) => Ok(a.to_lowercase()),
        Sexp::Text(t, _) => Ok(t.clone()),
        other => Err(syntax(other.pos(), format!("expected a token, found {}", other.describe()))),
    }
}

fn plus_minus(s: &Sexp) -> Result<bool, LexiconError> {
    match s.as_atom() {
        Some("+") => Ok(true),
        Some("-") => Ok(false),
        _ => Err(syntax(s.pos(), "expected + or -")),
    }
}

fn parse_entry(item: &Sexp) -> Result<LexEntry, LexiconError> {
    let pos = item.pos();
    let parts = item.as_list().ok_or_else(|| syntax(pos, "expected (entry ...)"))?;
    let [head, lemma, fields @ ..] = parts else {
        return Err(syntax(pos, "expected (entry \"lemma\" ...)"));
    };
    if head.as_atom() != Some("entry") {
        return Err(syntax(head.pos(), "expected 'entry'"));
    }
    let lemma = match lemma {
        Sexp::Text(t, _) | Sexp::Atom(t, _) if !t.is_empty() => t.clone(),
        other => return Err(syntax(other.pos(), "lemma must be a nonempty string")),
    };
    let mut category = None;
    let mut entry = LexEntry::new(&lemma, Category::Noun);
    for field in fields {
        let fpos = field.pos();
        let items = field.as_list().ok_or_else(|| syntax(fpos, "expected a (field value) list"))?;
        let Some((name, args)) = items.split_first() else {
            return Err(syntax(fpos, "empty field"));
        };
        let name = name.as_atom().ok_or_else(|| syntax(fpos, "field name must be a token"))?;
        let single = || match args {
            [one] => Ok(one),
            _ => Err(syntax(fpos, format!("'{name}' takes one value"))),
        };
        match name {
            "cat" => {
                let c = token(single()?)?;
                category = Some(c.parse::<Category>().map_err(|m| syntax(fpos, m))?);
            }
            "flags" => parse_flags(args, &mut entry.flags)?,
            "irregular" => {
                for form in args {
                    let pair = form.as_list().ok_or_else(|| syntax(form.pos(), "expected ((TAGS) \"form\")"))?;
                    let [tags, surface] = pair else {
                        return Err(syntax(form.pos(), "expected ((TAGS) \"form\")"));
                    };
                    let tags = tags
                        .as_list()
                        .ok_or_else(|| syntax(tags.pos(), "expected a tag list"))?
                        .iter()
                        .map(|t| {
                            token(t)?.parse::<Tag>().map_err(|m| syntax(t.pos(), m.to_string()))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    entry.irregular.push((tags, token(surface)?));
                }
            }
            "subcat" => {
                for part in args {
                    let p = part.as_list().ok_or_else(|| syntax(part.pos(), "expected a subcat list"))?;
                    match p.split_first() {
                        Some((Sexp::Atom(k, _), vals)) if k == "required" => {
                            entry.subcat.required_roles =
                                vals.iter().map(token).collect::<Result<_, _>>()?;
                        }
                        Some((Sexp::Atom(k, _), [v])) if k == "object" => {
                            entry.subcat.obligatory_object = Some(token(v)?);
                        }
                        _ => return Err(syntax(part.pos(), "expected (required ...) or (object \"x\")")),
                    }
                }
            }
            "agr" => {
                let a = token(single()?)?;
                entry.agr = Some(a.parse().map_err(|m: String| syntax(fpos, m))?);
            }
            "wh-role" => entry.wh_role = Some(token(single()?)?),
            "relation" => entry.relation = Some(token(single()?)?),
            "connective" | "connective-pattern" => entry.connective = Some(token(single()?)?),
            other => return Err(syntax(fpos, format!("unknown field '{other}'"))),
        }
    }
    entry.category = category.ok_or_else(|| syntax(pos, format!("entry '{lemma}' has no (cat ...)")))?;
    if entry.category == Category::Wh && entry.wh_role.is_none() {
        return Err(syntax(pos, format!("wh entry '{lemma}' needs (wh-role ...)")));
    }
    if entry.category == Category::Conj && entry.connective.is_none() {
        return Err(syntax(pos, format!("conj entry '{lemma}' needs (connective ...)")));
    }
    Ok(entry)
}

fn parse_flags(args: &[Sexp], flags: &mut LexFlags) -> Result<(), LexiconError> {
    for flag in args {
        let fpos = flag.pos();
        let pair = flag.as_list().ok_or_else(|| syntax(fpos, "expected (flag value)"))?;
        let [name, value] = pair else {
            return Err(syntax(fpos, "expected (flag value)"));
        };
        let name = name.as_atom().ok_or_else(|| syntax(fpos, "flag name must be a token"))?;
        match name {
            "soften" => flags.soften = plus_minus(value)?,
            "vowel-drop" => flags.vowel_drop = plus_minus(value)?,
            "pronominal-n" => flags.pronominal_n = plus_minus(value)?,
            "article" => flags.article = plus_minus(value)?,
            "harmony" | "harmony-override" => {
                flags.harmony_override = Some(match token(value)?.as_str() {
                    "front" => Frontness::Front,
                    "back" => Frontness::Back,
                    _ => return Err(syntax(fpos, "harmony takes front or back")),
                })
            }
            "nominalizer" => {
                flags.nominalizer = Some(match token(value)?.as_str() {
                    "ma" => Nominalizer::Ma,
                    "is" | "iş" => Nominalizer::Is,
                    _ => return Err(syntax(fpos, "nominalizer takes ma or is")),
                })
            }
            "aorist" => {
                flags.aorist = Some(match token(value)?.as_str() {
                    "ar" => AoristClass::Ar,
                    "ir" => AoristClass::Ir,
                    _ => return Err(syntax(fpos, "aorist takes ar or ir")),
                })
            }
            "det-position" => flags.det_position = Some(token(value)?),
            other => return Err(syntax(fpos, format!("unknown flag '{other}'"))),
        }
    }
    Ok(())
}

/// The lexicon shipped with the crate.
pub const SHIPPED_LEXICON: &str = include_str!("../data/lexicon.tlx");

pub fn shipped() -> Lexicon {
    Lexicon::load(SHIPPED_LEXICON).expect("shipped lexicon is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_flags_and_irregulars() {
        let lex = Lexicon::load(
            r#"(entry "kitap" (cat noun) (flags (soften +)))
               (entry "ben" (cat pronoun) (agr 1sg) (irregular (("GEN") "benim")))"#,
        )
        .unwrap();
        assert!(lex.lookup("kitap", Category::Noun).unwrap().flags.soften);
        let ben = lex.lookup("ben", Category::Pronoun).unwrap();
        assert_eq!(ben.irregular_form(&[Tag::Gen]), Some("benim"));
        assert_eq!(ben.irregular_form(&[Tag::Dat]), None);
        assert_eq!(ben.agr, Some(Agreement::new(1, false)));
    }

    #[test]
    fn empty_and_duplicate() {
        assert!(Lexicon::load("").unwrap().is_empty());
        let err = Lexicon::load(
            "(entry \"kitap\" (cat noun))\n(entry \"kitap\" (cat noun) (flags (soften +)))",
        )
        .unwrap_err();
        assert_eq!(err.code(), "duplicate-entry");
        assert!(matches!(err, LexiconError::DuplicateEntry { pos: Pos { line: 2, .. }, .. }));
        // same lemma, different category is fine
        Lexicon::load("(entry \"o\" (cat pronoun))\n(entry \"o\" (cat demons))").unwrap();
    }

    #[test]
    fn validation_errors() {
        assert_eq!(Lexicon::load("(entry \"x\")").unwrap_err().code(), "syntax-error");
        assert_eq!(Lexicon::load("(entry \"x\" (cat wh))").unwrap_err().code(), "syntax-error");
        assert_eq!(Lexicon::load("(entry \"x\" (cat conj))").unwrap_err().code(), "syntax-error");
        assert_eq!(
            Lexicon::load("(entry \"x\" (cat noun) (flags (soften maybe)))").unwrap_err().code(),
            "syntax-error"
        );
    }

    #[test]
    fn shipped_lookups() {
        let lex = shipped();
        assert_eq!(lex.lookup("bırak", Category::Verb).unwrap().lemma, "bırak");
        assert_eq!(lex.lookup("#bırak", Category::Verb).unwrap().lemma, "bırak");
        assert_eq!(lex.lookup_wh("goal").unwrap().lemma, "nereye");
        let err = lex.lookup("zzz", Category::Noun).unwrap_err();
        assert_eq!(err, LexiconError::MissingEntry { lemma: "zzz".into(), category: "noun".into() });
        assert_eq!(lex.lookup_relation("and").unwrap().lemma, "ve");
        assert_eq!(lex.lookup("ahmet", Category::ProperNoun).unwrap().lemma, "Ahmet");
    }
}
