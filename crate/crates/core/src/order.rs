//! Sentence-level constituent ordering. The ordering machine is a rule
//! file run by the grammar engine; the plan is read back off the
//! derivation.

use std::convert::Infallible;
use std::fmt;

use crate::caseframe::{is_indefinite_dirobj, CaseFrame, Control, QuesType, Role};
use crate::fs::{FeatureStructure, Value};
use crate::grammar::{self, Child, CompiledGrammar, DeriveError, Derivation, Node, Silent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotKind {
    Topic,
    Default,
    Focus,
    Verb,
    Background,
}

impl SlotKind {
    fn of_state(state: &str) -> Option<SlotKind> {
        match state {
            "s0" => Some(SlotKind::Topic),
            "focus" => Some(SlotKind::Focus),
            "predicate" => Some(SlotKind::Verb),
            "post" => Some(SlotKind::Background),
            s if s.starts_with('s') && s[1..].parse::<u32>().is_ok() => Some(SlotKind::Default),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SlotKind::Topic => "topic",
            SlotKind::Default => "default",
            SlotKind::Focus => "focus",
            SlotKind::Verb => "verb",
            SlotKind::Background => "background",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Slot {
    /// `None` for the verb.
    pub role: Option<Role>,
    pub kind: SlotKind,
    pub value: Value,
}

impl Slot {
    pub fn label(&self) -> &'static str {
        self.role.map(Role::as_str).unwrap_or("verb")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OrderPlan {
    pub slots: Vec<Slot>,
}

impl OrderPlan {
    pub fn labels(&self) -> Vec<&'static str> {
        self.slots.iter().map(Slot::label).collect()
    }

    pub fn roles(&self) -> Vec<Role> {
        self.slots.iter().filter_map(|s| s.role).collect()
    }

    pub fn verb_index(&self) -> Option<usize> {
        self.slots.iter().position(|s| s.kind == SlotKind::Verb)
    }

    pub fn index_of(&self, role: Role) -> Option<usize> {
        self.slots.iter().position(|s| s.role == Some(role))
    }
}

impl fmt::Display for OrderPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.labels().join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("control-overlap: {first} and {second} both name '{role}'")]
    ControlOverlap { role: Role, first: &'static str, second: &'static str },
    #[error("focus-conflict: the indefinite dir-obj must be immediately preverbal, but {slot} names '{role}'")]
    FocusConflict { slot: &'static str, role: Role },
    #[error("{0}")]
    Derive(DeriveError<Infallible>),
}

impl PlanError {
    pub fn code(&self) -> &'static str {
        match self {
            PlanError::ControlOverlap { .. } => "control-overlap",
            PlanError::FocusConflict { .. } => "focus-conflict",
            PlanError::Derive(e) => e.code(),
        }
    }
}

/// The control actually used for ordering: the frame's control with a
/// wh constituent claiming the focus, checked for overlaps and for the
/// indefinite-object constraint.
pub fn effective_control(cf: &CaseFrame) -> Result<Control, PlanError> {
    let mut ctl = cf.control.clone();
    if let Some(q) = cf.ques.as_ref().filter(|q| q.kind == QuesType::Wh) {
        if let Some(&w) = q.consts.first() {
            match ctl.focus {
                None => ctl.focus = Some(w),
                Some(f) if f == w => {}
                Some(_) => return Err(PlanError::FocusConflict { slot: "the wh question", role: w }),
            }
        }
    }
    let named = [("topic", ctl.topic), ("focus", ctl.focus), ("backgr", ctl.backgr)];
    for i in 0..named.len() {
        for j in i + 1..named.len() {
            if let (Some(a), Some(b)) = (named[i].1, named[j].1) {
                if a == b {
                    return Err(PlanError::ControlOverlap { role: a, first: named[i].0, second: named[j].0 });
                }
            }
        }
    }
    if is_indefinite_dirobj(cf) {
        if let Some(f) = ctl.focus.filter(|f| *f != Role::DirObj) {
            return Err(PlanError::FocusConflict { slot: "focus", role: f });
        }
        if ctl.backgr == Some(Role::DirObj) {
            return Err(PlanError::FocusConflict { slot: "backgr", role: Role::DirObj });
        }
        // As topic it is still preverbal when nothing else precedes the verb.
        let others_preverbal = cf.roles().into_iter().any(|r| r != Role::DirObj && Some(r) != ctl.backgr);
        if ctl.topic == Some(Role::DirObj) && others_preverbal {
            return Err(PlanError::FocusConflict { slot: "topic", role: Role::DirObj });
        }
    }
    Ok(ctl)
}

fn control_fs(ctl: &Control) -> FeatureStructure {
    let mut fs = FeatureStructure::new();
    for (name, r) in [("topic", ctl.topic), ("focus", ctl.focus), ("backgr", ctl.backgr)] {
        if let Some(r) = r {
            fs.insert(name, Value::atom(r.as_str()));
        }
    }
    fs
}

/// The structure handed to the ordering machine.
pub fn planning_input(cf: &CaseFrame) -> Result<FeatureStructure, PlanError> {
    let ctl = effective_control(cf)?;
    if ctl == cf.control && (!ctl.is_empty() || cf.fs.feature("control").is_none()) {
        return Ok(cf.fs.clone());
    }
    let mut fs = cf.fs.clone();
    fs.remove_feature("control");
    if !ctl.is_empty() {
        fs.insert("control", Value::Struct(control_fs(&ctl)));
    }
    Ok(fs)
}

/// Runs the ordering machine and returns the plan with its derivation.
pub fn plan_with_derivation(g: &CompiledGrammar, cf: &CaseFrame) -> Result<(OrderPlan, Derivation), PlanError> {
    let input = planning_input(cf)?;
    let d = grammar::derive(g, g.start(), &input, &mut Silent).map_err(PlanError::Derive)?;
    Ok((plan_of(&d), d))
}

pub fn plan(g: &CompiledGrammar, cf: &CaseFrame) -> Result<OrderPlan, PlanError> {
    plan_with_derivation(g, cf).map(|(p, _)| p)
}

/// Reconstructs the plan from a derivation of the ordering machine.
pub fn plan_of(d: &Derivation) -> OrderPlan {
    fn walk(n: &Node, out: &mut Vec<Slot>) {
        let kind = SlotKind::of_state(&n.nonterminal);
        for c in &n.children {
            match c {
                Child::Node(k) => walk(k, out),
                Child::Emission(e) if &*e.builtin == "nil" => {}
                Child::Emission(e) => {
                    let role = e.builtin.parse::<Role>().ok();
                    let kind = if role.is_none() { SlotKind::Verb } else { kind.unwrap_or(SlotKind::Default) };
                    out.push(Slot { role, kind, value: e.value.clone() });
                }
            }
        }
    }
    let mut slots = Vec::new();
    walk(&d.root, &mut slots);
    OrderPlan { slots }
}

/// Names of the constituents still present in a register, in default
/// order, followed by `verb` if the verb has not been emitted yet.
pub fn remaining(v: &Value) -> String {
    let Some(fs) = v.as_struct() else { return "-".into() };
    let mut names: Vec<&str> = Role::ALL.iter().filter(|r| fs.get(&r.path()).is_some()).map(|r| r.as_str()).collect();
    if fs.feature("verb").is_some() {
        names.push("verb");
    }
    if names.is_empty() { "-".into() } else { names.join(" ") }
}

/// The ordering trace: state, emission (or NIL), constituents remaining.
pub fn trace(d: &Derivation) -> String {
    grammar::trace_with(d, remaining)
}

/// The emission column of a trace.
pub fn emission_sequence(d: &Derivation) -> Vec<String> {
    d.emissions().iter().filter(|e| &*e.builtin != "nil").map(|e| e.builtin.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caseframe::validate_frame;
    use crate::engine::Engine;
    use crate::fs::parse_fs;
    use proptest::prelude::*;

    const EX5: &str = r##"((verb ((root "#bırak") (sense positive) (tense past) (aspect perfect)))
 (arguments ((subject "Ahmet") (dir-obj kitap) (location masa)))
 (adjuncts ((time dün)))"##;

    fn frame(control: &str) -> CaseFrame {
        validate_frame(&parse_fs(&format!("{EX5} {control})")).unwrap()).unwrap()
    }

    fn labels(cf: &CaseFrame) -> String {
        plan(&Engine::shipped().grammar, cf).unwrap().to_string()
    }

    #[test]
    fn ex5_ex6_ex7() {
        assert_eq!(labels(&frame("")), "subject time dir-obj location verb");
        assert_eq!(labels(&frame("(control ((topic time) (focus subject)))")), "time dir-obj location subject verb");
        assert_eq!(
            labels(&frame("(control ((topic time) (focus subject) (background location)))")),
            "time dir-obj subject verb location"
        );
        let only = validate_frame(&parse_fs("((verb ((root git))))").unwrap()).unwrap();
        assert_eq!(labels(&only), "verb");
    }

    #[test]
    fn slot_kinds() {
        let p = plan(&Engine::shipped().grammar, &frame("(control ((topic time) (focus subject) (backgr location)))"))
            .unwrap();
        let kinds: Vec<SlotKind> = p.slots.iter().map(|s| s.kind).collect();
        assert_eq!(
            kinds,
            vec![SlotKind::Topic, SlotKind::Default, SlotKind::Focus, SlotKind::Verb, SlotKind::Background]
        );
        assert_eq!(p.slots[0].value.as_struct().unwrap().lookup("ref.arg").unwrap().as_token(), Some("dün"));
    }

    #[test]
    fn ex7_trace() {
        let g = &Engine::shipped().grammar;
        let (_, d) = plan_with_derivation(g, &frame("(control ((topic time) (focus subject) (backgr location)))")).unwrap();
        assert_eq!(emission_sequence(&d), vec!["time", "dir-obj", "subject", "verb", "location"]);
        let t = trace(&d);
        assert!(t.starts_with("s0\ttime\tsubject dir-obj location verb\n"), "{t}");
        assert!(t.ends_with("post\tlocation\t-\n"), "{t}");
    }

    #[test]
    fn preflight_errors() {
        let g = &Engine::shipped().grammar;
        let err = plan(g, &frame("(control ((topic time) (focus time)))")).unwrap_err();
        assert_eq!(err.code(), "control-overlap");
        let indef = validate_frame(
            &parse_fs(
                "((verb ((root bırak) (tense past))) (args ((subject ali) (dir-obj ((ref ((arg kitap))) (spec ((det ((definite -)))))))
                  (location masa))))",
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(plan(g, &indef).unwrap().to_string(), "subject location dir-obj verb");
        let mut conflict = indef.clone();
        conflict.control.focus = Some(Role::Subject);
        assert_eq!(plan(g, &conflict).unwrap_err().code(), "focus-conflict");
        let mut ok = indef;
        ok.control.focus = Some(Role::DirObj);
        assert_eq!(plan(g, &ok).unwrap().to_string(), "subject location dir-obj verb");
    }

    fn arb_frame() -> impl Strategy<Value = (Vec<Role>, bool)> {
        (proptest::sample::subsequence(Role::ALL.to_vec(), 0..=13), any::<bool>())
    }

    fn build(roles: &[Role], indefinite: bool, ctl: &Control) -> CaseFrame {
        let mut args = String::new();
        let mut adjn = String::new();
        for r in roles {
            let np = if *r == Role::DirObj && indefinite {
                "((ref ((arg kitap))) (spec ((det ((definite -))))))".to_string()
            } else {
                "ev".to_string()
            };
            let target = if r.is_argument() { &mut args } else { &mut adjn };
            target.push_str(&format!("({} {}) ", r, np));
        }
        let mut text = format!("((verb ((root git))) (args ({args})) (adjn ({adjn}))");
        if !ctl.is_empty() {
            let mut c = String::new();
            for (n, r) in [("topic", ctl.topic), ("focus", ctl.focus), ("backgr", ctl.backgr)] {
                if let Some(r) = r {
                    c.push_str(&format!("({n} {r})"));
                }
            }
            text.push_str(&format!(" (control ({c}))"));
        }
        text.push(')');
        validate_frame(&parse_fs(&text).unwrap()).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn empty_control_gives_default_order((roles, _) in arb_frame()) {
            let cf = build(&roles, false, &Control::default());
            let p = plan(&Engine::shipped().grammar, &cf).unwrap();
            let mut want: Vec<&str> = roles.iter().map(|r| r.as_str()).collect();
            want.push("verb");
            prop_assert_eq!(p.labels(), want);
        }

        #[test]
        fn positional_laws((roles, indefinite) in arb_frame(), t in 0usize..14, f in 0usize..14, b in 0usize..14) {
            let pick = |i: usize| if i == 0 { None } else { roles.get(i - 1).copied() };
            let ctl = Control { topic: pick(t), focus: pick(f), backgr: pick(b) };
            let cf = build(&roles, indefinite, &ctl);
            let g = &Engine::shipped().grammar;
            match plan(g, &cf) {
                Ok(p) => {
                    let v = p.verb_index().unwrap();
                    if let Some(r) = ctl.topic { prop_assert_eq!(p.index_of(r), Some(0)); }
                    if let Some(r) = ctl.focus { prop_assert_eq!(p.index_of(r), Some(v - 1)); }
                    if let Some(r) = ctl.backgr { prop_assert!(p.index_of(r).unwrap() > v); }
                    if is_indefinite_dirobj(&cf) { prop_assert_eq!(p.index_of(Role::DirObj), Some(v - 1)); }
                    // stability: default slots keep their relative order without control
                    let base = plan(g, &build(&roles, indefinite, &Control::default())).unwrap();
                    let defaults: Vec<Role> = p.slots.iter().filter(|s| s.kind == SlotKind::Default).filter_map(|s| s.role).collect();
                    let base_order: Vec<Role> = base.roles().into_iter().filter(|r| defaults.contains(r)).collect();
                    prop_assert_eq!(defaults, base_order);
                }
                Err(e) => prop_assert!(matches!(e.code(), "control-overlap" | "focus-conflict")),
            }
        }
    }
}
