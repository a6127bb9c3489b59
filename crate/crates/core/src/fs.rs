//! Recursive feature structures with the pseudo-unification operations used
//! by grammar rules: path lookup, assignment, removal, constraint checks and
//! a non-reentrant unify.
//!
//! Structures are values. Every operation that "modifies" a structure works
//! on a copy; sub-structures are reference counted so copying a register is
//! cheap and mutation clones only the maps along the touched path.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::sexpr::{self, Pos, Sexp};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FsError {
    #[error("syntax-error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("duplicate-feature '{name}' at {pos}")]
    DuplicateFeature { name: String, pos: Pos },
    #[error("path-through-atom: '{path}' passes through a non-structure value")]
    PathThroughAtom { path: String },
    #[error("clash at '{path}'")]
    Clash { path: String },
    #[error("invalid-path '{0}'")]
    InvalidPath(String),
}

impl FsError {
    pub fn code(&self) -> &'static str {
        match self {
            FsError::Syntax { .. } => "syntax-error",
            FsError::DuplicateFeature { .. } => "duplicate-feature",
            FsError::PathThroughAtom { .. } => "path-through-atom",
            FsError::Clash { .. } => "clash",
            FsError::InvalidPath(_) => "invalid-path",
        }
    }
}

impl From<sexpr::SyntaxError> for FsError {
    fn from(e: sexpr::SyntaxError) -> Self {
        FsError::Syntax { pos: e.pos, message: e.message }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    /// Bare token, stored lowercase.
    Atom(Arc<str>),
    /// Quoted string, case preserved.
    Text(Arc<str>),
    Struct(FeatureStructure),
    List(Vec<Value>),
}

fn lowercase(s: &str) -> std::borrow::Cow<'_, str> {
    if s.chars().any(char::is_uppercase) {
        s.to_lowercase().into()
    } else {
        s.into()
    }
}

pub const UNDEFINED: &str = "*undefined*";
pub const REMOVE: &str = "*remove*";

impl Value {
    pub fn atom(token: &str) -> Value {
        Value::Atom(lowercase(token).into())
    }

    pub fn text(s: impl Into<Arc<str>>) -> Value {
        Value::Text(s.into())
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Value::Atom(a) => Some(a),
            _ => None,
        }
    }

    /// Atom or quoted text.
    pub fn as_token(&self) -> Option<&str> {
        match self {
            Value::Atom(a) | Value::Text(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_struct(&self) -> Option<&FeatureStructure> {
        match self {
            Value::Struct(fs) => Some(fs),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Value]> {
        match self {
            Value::List(items) => Some(items),
            _ => None,
        }
    }
}

impl From<FeatureStructure> for Value {
    fn from(fs: FeatureStructure) -> Self {
        Value::Struct(fs)
    }
}

/// Returns true when `name` can be used as a feature name or bare atom.
pub fn is_token(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | '[' | ']' | '"' | ';'))
}

/// A nonempty chain of feature names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path(Vec<String>);

impl Path {
    pub fn new<I, S>(segments: I) -> Result<Path, FsError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let segs: Vec<String> = segments.into_iter().map(|s| s.as_ref().to_lowercase()).collect();
        if segs.is_empty() || !segs.iter().all(|s| is_token(s)) {
            return Err(FsError::InvalidPath(segs.join(".")));
        }
        Ok(Path(segs))
    }

    pub fn segments(&self) -> &[String] {
        &self.0
    }

    pub fn child(&self, name: &str) -> Path {
        let mut segs = self.0.clone();
        segs.push(name.to_lowercase());
        Path(segs)
    }
}

impl FromStr for Path {
    type Err = FsError;

    /// Dot-separated segments, e.g. `control.topic`.
    fn from_str(s: &str) -> Result<Path, FsError> {
        Path::new(s.split('.'))
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("."))
    }
}

/// Right-hand side of a `=c` check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expected {
    Atom(String),
    Undefined,
}

/// Ordered map from feature name to value. Equality ignores feature order.
///
/// Structures hold a handful of features, so entries live in a vector
/// searched linearly; names are shared so copying a map never copies text.
#[derive(Clone)]
pub struct FeatureStructure {
    entries: Arc<Entries>,
}

type Entries = Vec<(Arc<str>, Value)>;

static EMPTY: std::sync::LazyLock<Arc<Entries>> = std::sync::LazyLock::new(Arc::default);

impl Default for FeatureStructure {
    fn default() -> Self {
        FeatureStructure { entries: Arc::clone(&EMPTY) }
    }
}

impl PartialEq for FeatureStructure {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.entries, &other.entries)
            || (self.len() == other.len() && self.iter().all(|(k, v)| other.feature(k) == Some(v)))
    }
}

impl Eq for FeatureStructure {}

/// Feature names are short; an inline byte loop beats a call to memcmp.
#[inline]
fn same_name(a: &str, b: &str) -> bool {
    a.len() == b.len() && a.bytes().zip(b.bytes()).all(|(x, y)| x == y)
}

fn position(entries: &[(Arc<str>, Value)], name: &str) -> Option<usize> {
    entries.iter().position(|(k, _)| same_name(k, name))
}

fn slot<'a>(entries: &'a mut Entries, name: &str, init: impl FnOnce() -> Value) -> &'a mut Value {
    let i = match position(entries, name) {
        Some(i) => i,
        None => {
            entries.push((Arc::from(name), init()));
            entries.len() - 1
        }
    };
    &mut entries[i].1
}

fn put_entry(entries: &mut Entries, name: &str, value: Value) {
    match position(entries, name) {
        Some(i) => entries[i].1 = value,
        None => entries.push((Arc::from(name), value)),
    }
}

impl fmt::Debug for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FeatureStructure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.entries.iter().map(|(k, v)| (&**k, v))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| &**k)
    }

    pub fn feature(&self, name: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| same_name(k, name)).map(|(_, v)| v)
    }

    /// In-place insert of a top-level feature; replaces an existing value
    /// without changing its position.
    pub fn insert(&mut self, name: &str, value: Value) {
        put_entry(Arc::make_mut(&mut self.entries), &lowercase(name), value);
    }

    pub fn remove_feature(&mut self, name: &str) -> Option<Value> {
        let i = position(&self.entries, name)?;
        Some(Arc::make_mut(&mut self.entries).remove(i).1)
    }

    pub fn with(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.insert(name, value.into());
        self
    }

    pub fn get(&self, path: &Path) -> Option<&Value> {
        self.get_segments(path.segments().iter().map(String::as_str))
    }

    /// Lookup by dot-separated path string; absent on malformed paths.
    pub fn lookup(&self, dotted: &str) -> Option<&Value> {
        self.get_segments(dotted.split('.'))
    }

    fn get_segments<'a>(&self, mut segs: impl Iterator<Item = &'a str>) -> Option<&Value> {
        let first = segs.next()?;
        let mut cur = self.feature(first)?;
        for seg in segs {
            cur = cur.as_struct()?.feature(seg)?;
        }
        Some(cur)
    }

    /// Returns a copy with `v` stored at `path`, creating intermediate
    /// structures as needed.
    pub fn put(&self, path: &Path, v: Value) -> Result<FeatureStructure, FsError> {
        let mut out = self.clone();
        out.set(path, v)?;
        Ok(out)
    }

    pub fn set(&mut self, path: &Path, v: Value) -> Result<(), FsError> {
        let segs = path.segments();
        let mut cur = self;
        for (i, seg) in segs[..segs.len() - 1].iter().enumerate() {
            let map = Arc::make_mut(&mut cur.entries);
            cur = match slot(map, seg, || Value::Struct(FeatureStructure::new())) {
                Value::Struct(fs) => fs,
                _ => {
                    return Err(FsError::PathThroughAtom {
                        path: segs[..=i].join("."),
                    })
                }
            };
        }
        put_entry(Arc::make_mut(&mut cur.entries), &segs[segs.len() - 1], v);
        Ok(())
    }

    /// Returns a copy with the entry at `path` deleted; absent paths are a no-op.
    pub fn remove_at(&self, path: &Path) -> FeatureStructure {
        let mut out = self.clone();
        out.unset(path);
        out
    }

    pub fn unset(&mut self, path: &Path) {
        if self.get(path).is_none() {
            return;
        }
        let segs = path.segments();
        let mut cur = self;
        for seg in &segs[..segs.len() - 1] {
            let map = Arc::make_mut(&mut cur.entries);
            cur = match position(map, seg).map(|i| &mut map[i].1) {
                Some(Value::Struct(fs)) => fs,
                _ => return,
            };
        }
        let map = Arc::make_mut(&mut cur.entries);
        if let Some(i) = position(map, &segs[segs.len() - 1]) {
            map.remove(i);
        }
    }

    pub fn constrain_eq(&self, path: &Path, expected: &Expected) -> bool {
        match (self.get(path), expected) {
            (None, Expected::Undefined) => true,
            (Some(Value::Atom(a)), Expected::Atom(e)) => **a == **e,
            _ => false,
        }
    }

    pub fn unify(&self, other: &FeatureStructure) -> Result<FeatureStructure, FsError> {
        unify_at(self, other, &mut Vec::new())
    }
}

fn unify_at(
    a: &FeatureStructure,
    b: &FeatureStructure,
    trail: &mut Vec<String>,
) -> Result<FeatureStructure, FsError> {
    let mut out = a.clone();
    for (name, bv) in b.iter() {
        trail.push(name.to_string());
        let merged = match a.feature(name) {
            None => bv.clone(),
            Some(av) => unify_values(av, bv, trail)?,
        };
        trail.pop();
        out.insert(name, merged);
    }
    Ok(out)
}

fn unify_values(a: &Value, b: &Value, trail: &mut Vec<String>) -> Result<Value, FsError> {
    match (a, b) {
        (Value::Struct(x), Value::Struct(y)) => Ok(Value::Struct(unify_at(x, y, trail)?)),
        _ if a == b => Ok(a.clone()),
        _ => Err(FsError::Clash { path: trail.join(".") }),
    }
}

pub fn parse_fs(text: &str) -> Result<FeatureStructure, FsError> {
    let items = sexpr::read_all(text)?;
    match items.as_slice() {
        [one] => fs_from_sexp(one),
        [] => Err(FsError::Syntax {
            pos: Pos { line: 1, col: 1 },
            message: "expected a feature structure".into(),
        }),
        [_, second, ..] => Err(FsError::Syntax {
            pos: second.pos(),
            message: "trailing input after feature structure".into(),
        }),
    }
}

/// Parses a file holding any number of top-level structures.
pub fn parse_many(text: &str) -> Result<Vec<FeatureStructure>, FsError> {
    sexpr::read_all(text)?.iter().map(fs_from_sexp).collect()
}

pub(crate) fn fs_from_sexp(sexp: &Sexp) -> Result<FeatureStructure, FsError> {
    let Sexp::List(pairs, _) = sexp else {
        return Err(FsError::Syntax {
            pos: sexp.pos(),
            message: format!("expected '(' starting a feature structure, found {}", sexp.describe()),
        });
    };
    let mut map: Entries = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let Sexp::List(parts, ppos) = pair else {
            return Err(FsError::Syntax {
                pos: pair.pos(),
                message: format!("expected '(name value)' pair, found {}", pair.describe()),
            });
        };
        let [name, value] = parts.as_slice() else {
            return Err(FsError::Syntax {
                pos: *ppos,
                message: format!("a pair holds a name and one value, found {} items", parts.len()),
            });
        };
        let Some(name) = name.as_atom() else {
            return Err(FsError::Syntax {
                pos: name.pos(),
                message: "feature name must be a bare token".into(),
            });
        };
        let name = name.to_lowercase();
        if position(&map, &name).is_some() {
            return Err(FsError::DuplicateFeature { name, pos: *ppos });
        }
        let value = value_from_sexp(value)?;
        map.push((Arc::from(name), value));
    }
    Ok(FeatureStructure { entries: Arc::new(map) })
}

pub(crate) fn value_from_sexp(sexp: &Sexp) -> Result<Value, FsError> {
    Ok(match sexp {
        Sexp::Atom(a, _) => Value::atom(a),
        Sexp::Text(t, _) => Value::text(t.as_str()),
        Sexp::List(..) => Value::Struct(fs_from_sexp(sexp)?),
        Sexp::Bracket(items, _) => {
            Value::List(items.iter().map(value_from_sexp).collect::<Result<_, _>>()?)
        }
    })
}

/// Canonical multi-line form: one pair per line, two spaces per depth.
pub fn print_fs(fs: &FeatureStructure) -> String {
    let mut out = String::new();
    write_block(&mut out, fs, 0);
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_block(out: &mut String, fs: &FeatureStructure, depth: usize) {
    if fs.is_empty() {
        out.push_str("()");
        return;
    }
    out.push_str("(\n");
    for (name, value) in fs.iter() {
        indent(out, depth + 1);
        out.push('(');
        out.push_str(name);
        out.push(' ');
        write_value(out, value, depth + 1);
        out.push_str(")\n");
    }
    indent(out, depth);
    out.push(')');
}

fn write_value(out: &mut String, value: &Value, depth: usize) {
    match value {
        Value::Atom(a) => out.push_str(a),
        Value::Text(t) => write_text(out, t),
        Value::Struct(fs) => write_block(out, fs, depth),
        Value::List(items) if items.iter().all(|v| !matches!(v, Value::Struct(_) | Value::List(_))) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_value(out, item, depth);
            }
            out.push(']');
        }
        Value::List(items) => {
            out.push_str("[\n");
            for item in items {
                indent(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push('\n');
            }
            indent(out, depth);
            out.push(']');
        }
    }
}

fn write_text(out: &mut String, t: &str) {
    out.push('"');
    for c in t.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
}

fn write_compact(out: &mut String, value: &Value) {
    match value {
        Value::Atom(a) => out.push_str(a),
        Value::Text(t) => write_text(out, t),
        Value::Struct(fs) => {
            out.push('(');
            for (name, v) in fs.iter() {
                out.push('(');
                out.push_str(name);
                out.push(' ');
                write_compact(out, v);
                out.push(')');
            }
            out.push(')');
        }
        Value::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_compact(out, item);
            }
            out.push(']');
        }
    }
}

/// Single-line form, e.g. `((control ((topic time))))`.
impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_compact(&mut s, &Value::Struct(self.clone()));
        f.write_str(&s)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_compact(&mut s, self);
        f.write_str(&s)
    }
}

impl FromStr for FeatureStructure {
    type Err = FsError;

    fn from_str(s: &str) -> Result<Self, FsError> {
        parse_fs(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Path {
        s.parse().unwrap()
    }

    fn fs(s: &str) -> FeatureStructure {
        parse_fs(s).unwrap()
    }

    #[test]
    fn get_follows_segments() {
        let f = fs("((control ((topic time))))");
        assert_eq!(f.get(&p("control.topic")), Some(&Value::atom("time")));
        assert_eq!(FeatureStructure::new().get(&p("control.topic")), None);
        let f = fs(r#"((verb ((root "bırak"))))"#);
        assert_eq!(f.get(&p("verb.root")), Some(&Value::text("bırak")));
    }

    #[test]
    fn put_creates_and_preserves() {
        let f = FeatureStructure::new().put(&p("control.topic"), Value::atom("time")).unwrap();
        assert_eq!(f, fs("((control ((topic time))))"));
        let g = f.put(&p("control.focus"), Value::atom("subject")).unwrap();
        assert_eq!(g, fs("((control ((topic time) (focus subject))))"));
        // the original is untouched
        assert_eq!(f, fs("((control ((topic time))))"));
        let err = fs(r#"((verb ((root "x"))))"#)
            .put(&p("verb.root.y"), Value::atom("a"))
            .unwrap_err();
        assert_eq!(err.code(), "path-through-atom");
    }

    #[test]
    fn remove_at_deletes_or_ignores() {
        let f = fs("((args ((subject s) (dir-obj o))))");
        assert_eq!(f.remove_at(&p("args.subject")), fs("((args ((dir-obj o))))"));
        assert_eq!(FeatureStructure::new().remove_at(&p("args.subject")), FeatureStructure::new());
    }

    #[test]
    fn constrain_eq_cases() {
        let f = fs("((control ((topic subject))))");
        assert!(f.constrain_eq(&p("control.topic"), &Expected::Atom("subject".into())));
        assert!(FeatureStructure::new().constrain_eq(&p("control.topic"), &Expected::Undefined));
        let g = fs("((control ((topic time))))");
        assert!(!g.constrain_eq(&p("control.topic"), &Expected::Atom("subject".into())));
        // present non-atom never matches
        assert!(!f.constrain_eq(&p("control"), &Expected::Atom("subject".into())));
        assert!(!f.constrain_eq(&p("control"), &Expected::Undefined));
    }

    #[test]
    fn unify_cases() {
        assert_eq!(fs("((a x))").unify(&fs("((b y))")).unwrap(), fs("((a x) (b y))"));
        assert_eq!(fs("((a x))").unify(&fs("((a x))")).unwrap(), fs("((a x))"));
        let err = fs("((a x))").unify(&fs("((a y))")).unwrap_err();
        assert_eq!(err, FsError::Clash { path: "a".into() });
        let err = fs("((a ((b x))))").unify(&fs("((a ((b ((c d))))))")).unwrap_err();
        assert_eq!(err, FsError::Clash { path: "a.b".into() });
    }

    #[test]
    fn parse_errors() {
        assert_eq!(fs("((control ((topic time))))").to_string(), "((control ((topic time))))");
        let err = parse_fs("((a x)(a y))").unwrap_err();
        assert_eq!(err.code(), "duplicate-feature");
        let err = parse_fs("((a x)\n (b))").unwrap_err();
        assert!(matches!(err, FsError::Syntax { pos: Pos { line: 2, col: 2 }, .. }), "{err:?}");
        assert_eq!(parse_fs("").unwrap_err().code(), "syntax-error");
    }

    #[test]
    fn atoms_are_lowercased_text_is_not() {
        let f = fs(r#"((S-FORM Finite) (name "Ayşe"))"#);
        assert_eq!(f.lookup("s-form"), Some(&Value::atom("finite")));
        assert_eq!(f.lookup("name"), Some(&Value::text("Ayşe")));
    }

    #[test]
    fn canonical_print_layout() {
        let f = fs(r#"((a x) (b ((c "q\"t"))) (l [u v]) (e ()))"#);
        let printed = print_fs(&f);
        assert_eq!(
            printed,
            "(\n  (a x)\n  (b (\n    (c \"q\\\"t\")\n  ))\n  (l [u v])\n  (e ())\n)"
        );
        assert_eq!(parse_fs(&printed).unwrap(), f);
    }

    fn arb_name() -> impl Strategy<Value = String> {
        "[a-z][a-z0-9-]{0,6}"
    }

    fn arb_value() -> impl Strategy<Value = Value> {
        let leaf = prop_oneof![
            "[a-z0-9+*#-]{1,6}".prop_map(|a| Value::Atom(a.into())),
            "[ a-zA-Zçğışöü\"\\\\]{0,8}".prop_map(|t| Value::Text(t.into())),
        ];
        leaf.prop_recursive(4, 32, 5, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 0..4).prop_map(Value::List),
                prop::collection::vec((arb_name(), inner), 0..5).prop_map(|pairs| {
                    let mut fs = FeatureStructure::new();
                    for (k, v) in pairs {
                        fs.insert(&k, v);
                    }
                    Value::Struct(fs)
                }),
            ]
        })
    }

    fn arb_fs() -> impl Strategy<Value = FeatureStructure> {
        prop::collection::vec((arb_name(), arb_value()), 0..6).prop_map(|pairs| {
            let mut fs = FeatureStructure::new();
            for (k, v) in pairs {
                fs.insert(&k, v);
            }
            fs
        })
    }

    fn arb_path() -> impl Strategy<Value = Path> {
        prop::collection::vec(arb_name(), 1..4).prop_map(|s| Path::new(s).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn print_parse_round_trip(f in arb_fs()) {
            let printed = print_fs(&f);
            let back = parse_fs(&printed).unwrap();
            prop_assert_eq!(&back, &f);
            // printing is canonical
            prop_assert_eq!(print_fs(&back), printed);
            prop_assert_eq!(parse_fs(&f.to_string()).unwrap(), f);
        }

        #[test]
        fn get_after_put(f in arb_fs(), path in arb_path(), v in arb_value()) {
            if let Ok(g) = f.put(&path, v.clone()) {
                prop_assert_eq!(g.get(&path), Some(&v));
            }
        }

        #[test]
        fn undefined_iff_absent(f in arb_fs(), path in arb_path()) {
            prop_assert_eq!(f.constrain_eq(&path, &Expected::Undefined), f.get(&path).is_none());
        }

        #[test]
        fn remove_inverts_put_on_absent(f in arb_fs(), path in arb_path(), v in arb_value()) {
            if f.get(&path).is_none() {
                if let Ok(g) = f.put(&path, v) {
                    // intermediate structures created by put may remain empty
                    let back = g.remove_at(&path);
                    prop_assert_eq!(prune_created(&back, &f), f);
                }
            }
        }

        #[test]
        fn unify_idempotent_and_commutative(a in arb_fs(), b in arb_fs()) {
            prop_assert_eq!(a.unify(&a).unwrap(), a.clone());
            match (a.unify(&b), b.unify(&a)) {
                (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
                (Err(_), Err(_)) => {}
                (x, y) => prop_assert!(false, "asymmetric: {:?} vs {:?}", x, y),
            }
        }
    }

    /// Drops empty structures that exist in `g` but not in `orig`.
    fn prune_created(g: &FeatureStructure, orig: &FeatureStructure) -> FeatureStructure {
        let mut out = FeatureStructure::new();
        for (k, v) in g.iter() {
            match (v, orig.feature(k)) {
                (Value::Struct(s), None) if is_hollow(s) => {}
                (Value::Struct(s), Some(Value::Struct(o))) => {
                    out.insert(k, Value::Struct(prune_created(s, o)))
                }
                _ => out.insert(k, v.clone()),
            }
        }
        out
    }

    fn is_hollow(s: &FeatureStructure) -> bool {
        s.iter().all(|(_, v)| matches!(v, Value::Struct(x) if is_hollow(x)))
    }
}
