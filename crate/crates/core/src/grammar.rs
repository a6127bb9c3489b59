//! Rule formalism: right-linear backbone rules with feature constraint
//! equations over registers `x0..xn`, compiled into per-nonterminal tables
//! and executed by ordered choice with chronological backtracking.
//!
//! ```text
//! (<S> <==> (<Subject> <S1>)
//!   (((x0 control topic) =c subject)
//!    (x2 = x0)
//!    ((x2 args subject) = *remove*)
//!    (x1 = (x0 args subject))))
//! ```
//!
//! Constraint (`=c`) equations are checked against the incoming registers
//! before any assignment runs, wherever they are listed. An assignment whose
//! source path is absent makes the rule inapplicable. A nonterminal that has
//! no applicable rule fails back to its caller, which then tries its own next
//! rule; failures raised by builtins are not retried.
//!
//! When a nonterminal's leading rules all guard the same x0 path, the table
//! is indexed on that path and only rules whose guard can hold are tried.

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};
use std::fmt;
use std::sync::Arc;

use crate::fs::{Expected, FeatureStructure, FsError, Path, Value, REMOVE, UNDEFINED};
use crate::sexpr::{self, Pos, Sexp};

const MAX_DEPTH: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error("syntax-error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("bad-register at {pos}: x{register} in a rule with {rhs_len} right-hand symbols")]
    BadRegister { pos: Pos, register: usize, rhs_len: usize },
    #[error("undefined-nonterminal '{name}' used by <{lhs}> at {pos}")]
    UndefinedNonterminal { name: String, lhs: String, pos: Pos },
    #[error("no-start-symbol: the rule set is empty")]
    NoStart,
}

impl GrammarError {
    pub fn code(&self) -> &'static str {
        match self {
            GrammarError::Syntax { .. } => "syntax-error",
            GrammarError::BadRegister { .. } => "bad-register",
            GrammarError::UndefinedNonterminal { .. } => "undefined-nonterminal",
            GrammarError::NoStart => "no-start-symbol",
        }
    }
}

impl From<sexpr::SyntaxError> for GrammarError {
    fn from(e: sexpr::SyntaxError) -> Self {
        GrammarError::Syntax { pos: e.pos, message: e.message }
    }
}

/// A register with an optional feature path; an empty path means the
/// whole register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegPath {
    pub register: usize,
    pub path: Option<Path>,
}

impl fmt::Display for RegPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.path {
            None => write!(f, "x{}", self.register),
            Some(p) => write!(f, "(x{} {})", self.register, p.segments().join(" ")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Register(RegPath),
    Literal(Value),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equation {
    Assign { target: RegPath, source: Source },
    Constrain { target: RegPath, expected: Expected },
    Remove { target: RegPath },
}

impl Equation {
    pub fn is_constraint(&self) -> bool {
        matches!(self, Equation::Constrain { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub lhs: Arc<str>,
    pub rhs: Vec<Arc<str>>,
    pub equations: Vec<Equation>,
    pub pos: Pos,
    /// Sources read from an x0 the rule never writes; any one absent makes
    /// the rule inapplicable before its registers are built.
    input_sources: Vec<RegPath>,
}

fn input_sources(equations: &[Equation]) -> Vec<RegPath> {
    let writes_x0 = equations.iter().any(|eq| match eq {
        Equation::Assign { target, .. } | Equation::Remove { target } => target.register == 0,
        Equation::Constrain { .. } => false,
    });
    if writes_x0 {
        return Vec::new();
    }
    equations
        .iter()
        .filter_map(|eq| match eq {
            Equation::Assign { source: Source::Register(r @ RegPath { register: 0, .. }), .. } => Some(r.clone()),
            _ => None,
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
}

impl RuleSet {
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn extend(&mut self, other: RuleSet) {
        self.rules.extend(other.rules);
    }
}

fn symbol_name(raw: &str) -> String {
    raw.trim_start_matches('<').trim_end_matches('>').to_lowercase()
}

fn register_index(tok: &str) -> Option<usize> {
    let digits = tok.strip_prefix('x').or_else(|| tok.strip_prefix('X'))?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn syntax(pos: Pos, message: impl Into<String>) -> GrammarError {
    GrammarError::Syntax { pos, message: message.into() }
}

pub fn parse_rule_file(text: &str) -> Result<RuleSet, GrammarError> {
    let mut rules = Vec::new();
    for item in sexpr::read_all(text)? {
        rules.push(parse_rule(&item)?);
    }
    Ok(RuleSet { rules })
}

fn parse_rule(item: &Sexp) -> Result<Rule, GrammarError> {
    let pos = item.pos();
    let parts = item.as_list().ok_or_else(|| syntax(pos, "expected a rule list"))?;
    let [lhs, arrow, rhs, eqs] = parts else {
        return Err(syntax(pos, "expected (<Lhs> <==> (<Rhs>...) (equations...))"));
    };
    let lhs = lhs.as_atom().ok_or_else(|| syntax(lhs.pos(), "left-hand side must be a symbol"))?;
    if arrow.as_atom() != Some("<==>") {
        return Err(syntax(arrow.pos(), "expected '<==>'"));
    }
    let rhs_items = rhs
        .as_list()
        .ok_or_else(|| syntax(rhs.pos(), "right-hand side must be a list of symbols"))?;
    if rhs_items.is_empty() {
        return Err(syntax(rhs.pos(), "right-hand side needs at least one symbol"));
    }
    let rhs_names = rhs_items
        .iter()
        .map(|s| s.as_atom().map(|a| Arc::from(symbol_name(a))).ok_or_else(|| syntax(s.pos(), "expected a symbol")))
        .collect::<Result<Vec<Arc<str>>, _>>()?;
    let eq_items = eqs.as_list().ok_or_else(|| syntax(eqs.pos(), "expected an equation list"))?;
    let equations = eq_items
        .iter()
        .map(|e| parse_equation(e, rhs_names.len()))
        .collect::<Result<Vec<_>, _>>()?;
    let input_sources = input_sources(&equations);
    Ok(Rule { lhs: symbol_name(lhs).into(), rhs: rhs_names, equations, pos, input_sources })
}

fn parse_regpath(item: &Sexp, rhs_len: usize) -> Result<Option<RegPath>, GrammarError> {
    let check = |reg: usize, pos: Pos| {
        if reg > rhs_len {
            Err(GrammarError::BadRegister { pos, register: reg, rhs_len })
        } else {
            Ok(reg)
        }
    };
    match item {
        Sexp::Atom(a, pos) => match register_index(a) {
            Some(reg) => Ok(Some(RegPath { register: check(reg, *pos)?, path: None })),
            None => Ok(None),
        },
        Sexp::List(parts, pos) => {
            let Some((head, rest)) = parts.split_first() else {
                return Err(syntax(*pos, "empty register reference"));
            };
            let reg = head
                .as_atom()
                .and_then(register_index)
                .ok_or_else(|| syntax(head.pos(), "expected a register xK"))?;
            let reg = check(reg, head.pos())?;
            if rest.is_empty() {
                return Ok(Some(RegPath { register: reg, path: None }));
            }
            let segs = rest
                .iter()
                .map(|s| s.as_atom().ok_or_else(|| syntax(s.pos(), "path segments must be names")))
                .collect::<Result<Vec<_>, _>>()?;
            let path = Path::new(segs).map_err(|e| syntax(*pos, e.to_string()))?;
            Ok(Some(RegPath { register: reg, path: Some(path) }))
        }
        Sexp::Text(..) => Ok(None),
        other => Err(syntax(other.pos(), "expected a register reference")),
    }
}

fn parse_equation(item: &Sexp, rhs_len: usize) -> Result<Equation, GrammarError> {
    let pos = item.pos();
    let parts = item.as_list().ok_or_else(|| syntax(pos, "expected an equation"))?;
    let [lhs, op, rhs] = parts else {
        return Err(syntax(pos, "an equation has the form (lhs = rhs) or (lhs =c value)"));
    };
    let target = parse_regpath(lhs, rhs_len)?
        .ok_or_else(|| syntax(lhs.pos(), "equation must start with a register"))?;
    match op.as_atom() {
        Some("=c") => {
            if target.path.is_none() {
                return Err(syntax(lhs.pos(), "a constraint needs a feature path"));
            }
            let expected = match rhs {
                Sexp::Atom(a, _) if a.eq_ignore_ascii_case(UNDEFINED) => Expected::Undefined,
                Sexp::Atom(a, _) if register_index(a).is_none() => Expected::Atom(a.to_lowercase()),
                _ => return Err(syntax(rhs.pos(), "'=c' takes an atom or *undefined*")),
            };
            Ok(Equation::Constrain { target, expected })
        }
        Some("=") => {
            if let Sexp::Atom(a, _) = rhs {
                if a.eq_ignore_ascii_case(REMOVE) {
                    return Ok(Equation::Remove { target });
                }
                if a.eq_ignore_ascii_case(UNDEFINED) {
                    return Err(syntax(rhs.pos(), "*undefined* is only valid with '=c'"));
                }
            }
            let source = match parse_regpath(rhs, rhs_len)? {
                Some(r) => Source::Register(r),
                None => Source::Literal(match rhs {
                    Sexp::Atom(a, _) => Value::atom(a),
                    Sexp::Text(t, _) => Value::text(t.as_str()),
                    other => return Err(syntax(other.pos(), "unsupported assignment value")),
                }),
            };
            Ok(Equation::Assign { target, source })
        }
        _ => Err(syntax(op.pos(), "expected '=' or '=c'")),
    }
}

#[derive(Debug, Clone)]
pub struct CompiledGrammar {
    table: HashMap<Arc<str>, Vec<Arc<Rule>>>,
    dispatch: HashMap<Arc<str>, Dispatch>,
    builtins: HashSet<String>,
    start: Arc<str>,
    rule_count: usize,
}

/// Rule index over the leading rules of a nonterminal that all constrain
/// the same path of x0: the value found there selects which of them can
/// apply. Rules from `tail` on are tried in turn after the selected ones.
#[derive(Debug, Clone)]
struct Dispatch {
    path: Path,
    undefined: Vec<usize>,
    by_atom: HashMap<String, Vec<usize>>,
    tail: usize,
}

fn x0_guard(rule: &Rule, path: Option<&Path>) -> Option<(Path, Option<String>)> {
    rule.equations.iter().find_map(|eq| match eq {
        Equation::Constrain { target: RegPath { register: 0, path: Some(p) }, expected }
            if path.is_none_or(|q| q == p) =>
        {
            let key = match expected {
                Expected::Atom(a) => Some(a.clone()),
                Expected::Undefined => None,
            };
            Some((p.clone(), key))
        }
        _ => None,
    })
}

fn dispatch(rules: &[Arc<Rule>]) -> Option<Dispatch> {
    let (path, _) = x0_guard(rules.first()?, None)?;
    let mut d = Dispatch { path, undefined: Vec::new(), by_atom: HashMap::default(), tail: rules.len() };
    for (i, rule) in rules.iter().enumerate() {
        match x0_guard(rule, Some(&d.path)) {
            Some((_, Some(a))) => d.by_atom.entry(a).or_default().push(i),
            Some((_, None)) => d.undefined.push(i),
            None => {
                d.tail = i;
                break;
            }
        }
    }
    (d.tail > 1).then_some(d)
}

pub fn compile<I, S>(rules: RuleSet, builtins: I) -> Result<CompiledGrammar, GrammarError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let builtins: HashSet<String> = builtins.into_iter().map(|b| symbol_name(b.as_ref())).collect();
    let start = rules.rules.first().map(|r| r.lhs.clone()).ok_or(GrammarError::NoStart)?;
    let rule_count = rules.rules.len();
    let mut table: HashMap<Arc<str>, Vec<Arc<Rule>>> = HashMap::default();
    for rule in rules.rules {
        table.entry(rule.lhs.clone()).or_default().push(Arc::new(rule));
    }
    for rules in table.values() {
        for rule in rules {
            for sym in &rule.rhs {
                if !table.contains_key(sym) && !builtins.contains(&**sym) {
                    return Err(GrammarError::UndefinedNonterminal {
                        name: sym.to_string(),
                        lhs: rule.lhs.to_string(),
                        pos: rule.pos,
                    });
                }
            }
        }
    }
    let dispatch = table.iter().filter_map(|(nt, rules)| Some((Arc::clone(nt), dispatch(rules)?))).collect();
    Ok(CompiledGrammar { table, dispatch, builtins, start, rule_count })
}

impl CompiledGrammar {
    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn rules_for(&self, nonterminal: &str) -> &[Arc<Rule>] {
        self.table.get(nonterminal).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Indices of the rules for `nonterminal` whose x0 guards can hold on
    /// `input`, in table order.
    fn candidates(&self, nonterminal: &str, input: &Value) -> Option<(&[usize], usize)> {
        let d = self.dispatch.get(nonterminal)?;
        let selected: &[usize] = match input.as_struct().and_then(|fs| fs.get(&d.path)) {
            None => &d.undefined,
            Some(Value::Atom(a)) => d.by_atom.get(&**a).map(Vec::as_slice).unwrap_or(&[]),
            Some(_) => &[],
        };
        Some((selected, d.tail))
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = &str> {
        self.table.keys().map(|k| &**k)
    }

    pub fn is_builtin(&self, name: &str) -> bool {
        self.builtins.contains(name)
    }

    pub fn rule_count(&self) -> usize {
        self.rule_count
    }
}

/// Realizer hooks called for builtin symbols. A hook gets the register
/// value bound to its position in the rule and returns the tokens to emit.
pub trait Builtins {
    type Error;

    fn call(&mut self, name: &str, value: &Value) -> Result<Vec<String>, Self::Error>;
}

/// Hooks that emit nothing; useful for planning-only derivations.
pub struct Silent;

impl Builtins for Silent {
    type Error = std::convert::Infallible;

    fn call(&mut self, _: &str, _: &Value) -> Result<Vec<String>, Self::Error> {
        Ok(Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DeriveError<E> {
    UnknownStart(String),
    NoApplicableRule { nonterminal: String, input: Value },
    Builtin { builtin: String, nonterminal: String, source: E },
    Equation { nonterminal: String, pos: Pos, error: FsError },
    DepthExceeded { nonterminal: String },
}

impl<E> DeriveError<E> {
    pub fn code(&self) -> &'static str {
        match self {
            DeriveError::UnknownStart(_) => "unknown-start",
            DeriveError::NoApplicableRule { .. } => "no-applicable-rule",
            DeriveError::Builtin { .. } => "builtin-failure",
            DeriveError::Equation { .. } => "equation-error",
            DeriveError::DepthExceeded { .. } => "depth-exceeded",
        }
    }

    pub fn map_builtin<F>(self, f: impl FnOnce(E) -> F) -> DeriveError<F> {
        match self {
            DeriveError::UnknownStart(s) => DeriveError::UnknownStart(s),
            DeriveError::NoApplicableRule { nonterminal, input } => {
                DeriveError::NoApplicableRule { nonterminal, input }
            }
            DeriveError::Builtin { builtin, nonterminal, source } => {
                DeriveError::Builtin { builtin, nonterminal, source: f(source) }
            }
            DeriveError::Equation { nonterminal, pos, error } => {
                DeriveError::Equation { nonterminal, pos, error }
            }
            DeriveError::DepthExceeded { nonterminal } => DeriveError::DepthExceeded { nonterminal },
        }
    }
}

impl<E: fmt::Display> fmt::Display for DeriveError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeriveError::UnknownStart(s) => write!(f, "unknown-start: no rules for <{s}>"),
            DeriveError::NoApplicableRule { nonterminal, input } => {
                write!(f, "no-applicable-rule at <{nonterminal}> for {input}")
            }
            DeriveError::Builtin { builtin, nonterminal, source } => {
                write!(f, "{source} (while realizing <{builtin}> under <{nonterminal}>)")
            }
            DeriveError::Equation { nonterminal, pos, error } => {
                write!(f, "equation-error in <{nonterminal}> rule at {pos}: {error}")
            }
            DeriveError::DepthExceeded { nonterminal } => {
                write!(f, "depth-exceeded at <{nonterminal}>")
            }
        }
    }
}

impl<E: fmt::Debug + fmt::Display> std::error::Error for DeriveError<E> {}

#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    pub builtin: Arc<str>,
    pub value: Value,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Child {
    Node(Node),
    Emission(Emission),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub nonterminal: Arc<str>,
    /// Position of the committed rule within its nonterminal's table.
    pub rule_index: usize,
    pub rule: Arc<Rule>,
    /// Value of x0 when the rule was tried.
    pub input: Value,
    /// Registers after the rule's equations ran.
    pub registers: Vec<Value>,
    pub children: Vec<Child>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub root: Node,
    /// Rules whose guards were evaluated, committed or not.
    pub attempts: usize,
}

impl Derivation {
    /// Builtin emissions, left to right.
    pub fn emissions(&self) -> Vec<&Emission> {
        fn walk<'a>(n: &'a Node, out: &mut Vec<&'a Emission>) {
            for c in &n.children {
                match c {
                    Child::Node(k) => walk(k, out),
                    Child::Emission(e) => out.push(e),
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    pub fn tokens(&self) -> Vec<String> {
        self.emissions().into_iter().flat_map(|e| e.tokens.iter().cloned()).collect()
    }

    /// Committed rules in pre-order.
    pub fn nodes(&self) -> Vec<&Node> {
        fn walk<'a>(n: &'a Node, out: &mut Vec<&'a Node>) {
            out.push(n);
            for c in &n.children {
                if let Child::Node(k) = c {
                    walk(k, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }
}

enum Attempt<E> {
    NotApplicable,
    Failed(DeriveError<E>),
}

struct Deriver<'g, B: Builtins> {
    grammar: &'g CompiledGrammar,
    hooks: &'g mut B,
    attempts: usize,
}

pub fn derive<B: Builtins>(
    g: &CompiledGrammar,
    start: &str,
    fs: &FeatureStructure,
    hooks: &mut B,
) -> Result<Derivation, DeriveError<B::Error>> {
    let start = symbol_name(start);
    if !g.table.contains_key(start.as_str()) {
        return Err(DeriveError::UnknownStart(start));
    }
    let mut d = Deriver { grammar: g, hooks, attempts: 0 };
    let root = d.expand(&start, Value::Struct(fs.clone()), 0)?;
    Ok(Derivation { root, attempts: d.attempts })
}

fn read(regs: &[Value], r: &RegPath) -> Option<Value> {
    let base = &regs[r.register];
    match &r.path {
        None => Some(base.clone()),
        Some(p) => base.as_struct()?.get(p).cloned(),
    }
}

fn check(reg: &Value, path: &Option<Path>, expected: &Expected) -> bool {
    match path {
        Some(p) => match reg.as_struct() {
            Some(fs) => fs.constrain_eq(p, expected),
            None => *expected == Expected::Undefined,
        },
        None => false,
    }
}

fn write(regs: &mut [Value], r: &RegPath, v: Option<Value>) -> Result<(), FsError> {
    let Some(p) = &r.path else {
        regs[r.register] = v.unwrap_or_else(|| Value::Struct(FeatureStructure::new()));
        return Ok(());
    };
    let reg = &mut regs[r.register];
    if !matches!(reg, Value::Struct(_)) {
        if v.is_none() {
            return Ok(());
        }
        *reg = Value::Struct(FeatureStructure::new());
    }
    let Value::Struct(fs) = reg else { unreachable!() };
    match v {
        Some(v) => fs.set(p, v),
        None => {
            fs.unset(p);
            Ok(())
        }
    }
}

impl<'g, B: Builtins> Deriver<'g, B> {
    fn expand(&mut self, nt: &str, input: Value, depth: usize) -> Result<Node, DeriveError<B::Error>> {
        if depth > MAX_DEPTH {
            return Err(DeriveError::DepthExceeded { nonterminal: nt.to_string() });
        }
        let grammar = self.grammar;
        let rules = grammar.rules_for(nt);
        let mut deepest: Option<DeriveError<B::Error>> = None;
        let (selected, tail) = grammar.candidates(nt, &input).unwrap_or((&[], 0));
        let indices = selected.iter().copied().chain(tail..rules.len());
        for index in indices {
            match self.try_rule(nt, index, &rules[index], &input, depth) {
                Ok(node) => return Ok(node),
                Err(Attempt::NotApplicable) => {}
                Err(Attempt::Failed(e @ DeriveError::NoApplicableRule { .. })) => deepest = Some(e),
                Err(Attempt::Failed(e)) => return Err(e),
            }
        }
        Err(deepest.unwrap_or(DeriveError::NoApplicableRule { nonterminal: nt.to_string(), input }))
    }

    fn try_rule(
        &mut self,
        nt: &str,
        index: usize,
        rule: &Arc<Rule>,
        input: &Value,
        depth: usize,
    ) -> Result<Node, Attempt<B::Error>> {
        self.attempts += 1;
        // Constraints run before any assignment, when every register but x0 is empty.
        let empty = Value::Struct(FeatureStructure::new());
        for eq in &rule.equations {
            if let Equation::Constrain { target, expected } = eq {
                let reg = if target.register == 0 { input } else { &empty };
                if !check(reg, &target.path, expected) {
                    return Err(Attempt::NotApplicable);
                }
            }
        }
        let present = |r: &RegPath| match &r.path {
            None => true,
            Some(p) => input.as_struct().is_some_and(|fs| fs.get(p).is_some()),
        };
        if !rule.input_sources.iter().all(present) {
            return Err(Attempt::NotApplicable);
        }
        let mut regs = vec![empty; rule.rhs.len() + 1];
        regs[0] = input.clone();
        for eq in &rule.equations {
            let result = match eq {
                Equation::Constrain { .. } => continue,
                Equation::Remove { target } => write(&mut regs, target, None),
                Equation::Assign { target, source } => {
                    let value = match source {
                        Source::Literal(v) => Some(v.clone()),
                        Source::Register(r) => read(&regs, r),
                    };
                    if value.is_none() {
                        return Err(Attempt::NotApplicable);
                    }
                    write(&mut regs, target, value)
                }
            };
            result.map_err(|error| {
                Attempt::Failed(DeriveError::Equation { nonterminal: nt.to_string(), pos: rule.pos, error })
            })?;
        }
        let mut children = Vec::with_capacity(rule.rhs.len());
        for (i, sym) in rule.rhs.iter().enumerate() {
            let value = &regs[i + 1];
            if self.grammar.is_builtin(sym) {
                let tokens = self.hooks.call(sym, value).map_err(|source| {
                    Attempt::Failed(DeriveError::Builtin {
                        builtin: sym.to_string(),
                        nonterminal: nt.to_string(),
                        source,
                    })
                })?;
                children.push(Child::Emission(Emission { builtin: sym.clone(), value: value.clone(), tokens }));
            } else {
                let node = self.expand(sym, value.clone(), depth + 1).map_err(Attempt::Failed)?;
                children.push(Child::Node(node));
            }
        }
        Ok(Node {
            nonterminal: Arc::clone(&rule.lhs),
            rule_index: index,
            rule: Arc::clone(rule),
            input: input.clone(),
            registers: regs,
            children,
        })
    }
}

/// Replays a node's constraint equations against the registers it was
/// entered with.
pub fn constraints_hold(node: &Node) -> bool {
    let mut regs = vec![Value::Struct(FeatureStructure::new()); node.rule.rhs.len() + 1];
    regs[0] = node.input.clone();
    node.rule.equations.iter().all(|eq| match eq {
        Equation::Constrain { target, expected } => check(&regs[target.register], &target.path, expected),
        _ => true,
    })
}

/// Trace with the default summary: the top-level feature names of the
/// register handed to the continuation state.
pub fn trace(d: &Derivation) -> String {
    trace_with(d, |v| match v.as_struct() {
        Some(fs) if !fs.is_empty() => fs.keys().collect::<Vec<_>>().join(" "),
        _ => "-".to_string(),
    })
}

/// One tab-separated line per committed rule: state, emitted builtins (or
/// `NIL`), and a summary of what the next state receives.
pub fn trace_with(d: &Derivation, summarize: impl Fn(&Value) -> String) -> String {
    let mut out = String::new();
    for node in d.nodes() {
        let emitted: Vec<&str> = node
            .children
            .iter()
            .filter_map(|c| match c {
                Child::Emission(e) if &*e.builtin != "nil" => Some(&*e.builtin),
                _ => None,
            })
            .collect();
        let next = node
            .children
            .iter()
            .rposition(|c| matches!(c, Child::Node(_)))
            .map(|i| summarize(&node.registers[i + 1]))
            .unwrap_or_else(|| "-".to_string());
        let emitted = if emitted.is_empty() { "NIL".to_string() } else { emitted.join(" ") };
        out.push_str(&format!("{}\t{}\t{}\n", node.nonterminal, emitted, next));
    }
    out
}
