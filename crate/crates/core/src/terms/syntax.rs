use std::fmt;

use serde::{Deserialize, Serialize};

/// Sort of a label-level variable or constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sort {
    Action,
    Predicate,
    /// Any transition label (actions, predicates, label-operator results, store triples).
    Label,
    /// A declared data sort.
    Data(String),
}

impl Sort {
    /// Whether a value of sort `other` may stand where `self` is expected.
    pub fn accepts(&self, other: &Sort) -> bool {
        match (self, other) {
            (Sort::Label, Sort::Action | Sort::Predicate | Sort::Label) => true,
            (a, b) => a == b,
        }
    }

    pub fn is_data(&self) -> bool {
        matches!(self, Sort::Data(_))
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Action => f.write_str("Action"),
            Sort::Predicate => f.write_str("Predicate"),
            Sort::Label => f.write_str("Label"),
            Sort::Data(name) => f.write_str(name),
        }
    }
}

/// Label terms: actions, predicates, data, label-operator applications and store triples.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Action(String),
    Predicate(String),
    /// A data constant such as a tuple `u` or the symbolic store `d`.
    Const(String),
    Var(String, Sort),
    App(String, Vec<Label>),
    /// Multiset of data elements, associative and commutative with the empty multiset as unit.
    MSet(Vec<Label>),
    /// Store transition `< pre,-,post >`; the action slot is always the placeholder.
    Triple(Box<Label>, Box<Label>),
}

impl Label {
    pub fn action(name: &str) -> Self {
        Label::Action(name.to_string())
    }

    pub fn predicate(name: &str) -> Self {
        Label::Predicate(name.to_string())
    }

    pub fn var(name: &str, sort: Sort) -> Self {
        Label::Var(name.to_string(), sort)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Label::Var(..) => false,
            Label::Action(_) | Label::Predicate(_) | Label::Const(_) => true,
            Label::App(_, args) | Label::MSet(args) => args.iter().all(Label::is_ground),
            Label::Triple(pre, post) => pre.is_ground() && post.is_ground(),
        }
    }

    /// Label variables in order of first occurrence.
    pub fn vars(&self) -> Vec<(String, Sort)> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut Vec<(String, Sort)>) {
        match self {
            Label::Var(name, sort) => {
                if !out.iter().any(|(n, _)| n == name) {
                    out.push((name.clone(), sort.clone()));
                }
            }
            Label::Action(_) | Label::Predicate(_) | Label::Const(_) => {}
            Label::App(_, args) | Label::MSet(args) => {
                args.iter().for_each(|a| a.collect_vars(out));
            }
            Label::Triple(pre, post) => {
                pre.collect_vars(out);
                post.collect_vars(out);
            }
        }
    }

    fn fmt_data(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Const(c) => write!(f, "{{{c}}}"),
            other => write!(f, "{other}"),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Action(n) | Label::Predicate(n) | Label::Const(n) | Label::Var(n, _) => {
                f.write_str(n)
            }
            Label::App(op, args) => {
                f.write_str(op)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
            Label::MSet(elems) => {
                f.write_str("{")?;
                for (i, e) in elems.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str("}")
            }
            Label::Triple(pre, post) => {
                f.write_str("< ")?;
                pre.fmt_data(f)?;
                f.write_str(",-,")?;
                post.fmt_data(f)?;
                f.write_str(" >")
            }
        }
    }
}

/// Process terms over the built-in BCCSP operators and a user signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    /// The deadlock constant `0`.
    Nil,
    Prefix(Label, Box<Term>),
    Choice(Box<Term>, Box<Term>),
    /// Application of a user-declared process operator.
    App(String, Vec<Term>),
    /// Recursion constant, unfolded through the spec's definitions.
    Def(String),
    /// Data argument of a process operator, e.g. the tuple in `ask(u)`.
    Data(Label),
}

impl Term {
    pub fn prefix(label: Label, body: Term) -> Self {
        Term::Prefix(label, Box::new(body))
    }

    pub fn choice(left: Term, right: Term) -> Self {
        Term::Choice(Box::new(left), Box::new(right))
    }

    pub fn app(op: &str, args: Vec<Term>) -> Self {
        Term::App(op.to_string(), args)
    }

    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    /// Right-nested sum of the given summands; `0` when empty.
    pub fn sum(summands: impl IntoIterator<Item = Term>) -> Term {
        let mut items: Vec<Term> = summands.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Term::Nil;
        };
        while let Some(next) = items.pop() {
            acc = Term::choice(next, acc);
        }
        acc
    }

    /// No process or label variables anywhere. Recursion constants are allowed.
    pub fn is_closed(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Nil | Term::Def(_) => true,
            Term::Prefix(l, body) => l.is_ground() && body.is_closed(),
            Term::Choice(a, b) => a.is_closed() && b.is_closed(),
            Term::App(_, args) => args.iter().all(Term::is_closed),
            Term::Data(l) => l.is_ground(),
        }
    }

    /// Only `0`, prefix, choice and (optionally) recursion constants.
    pub fn is_bccsp(&self, allow_defs: bool) -> bool {
        match self {
            Term::Nil => true,
            Term::Def(_) => allow_defs,
            Term::Prefix(_, body) => body.is_bccsp(allow_defs),
            Term::Choice(a, b) => a.is_bccsp(allow_defs) && b.is_bccsp(allow_defs),
            Term::Var(_) | Term::App(..) | Term::Data(_) => false,
        }
    }

    /// Process variables in order of first occurrence.
    pub fn proc_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_proc_vars(&mut out);
        out
    }

    fn collect_proc_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Nil | Term::Def(_) | Term::Data(_) => {}
            Term::Prefix(_, body) => body.collect_proc_vars(out),
            Term::Choice(a, b) => {
                a.collect_proc_vars(out);
                b.collect_proc_vars(out);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_proc_vars(out)),
        }
    }

    /// Label and data variables in order of first occurrence.
    pub fn label_vars(&self) -> Vec<(String, Sort)> {
        let mut out = Vec::new();
        self.collect_label_vars(&mut out);
        out
    }

    pub(crate) fn collect_label_vars(&self, out: &mut Vec<(String, Sort)>) {
        match self {
            Term::Var(_) | Term::Nil | Term::Def(_) => {}
            Term::Data(l) => l.collect_vars(out),
            Term::Prefix(l, body) => {
                l.collect_vars(out);
                body.collect_label_vars(out);
            }
            Term::Choice(a, b) => {
                a.collect_label_vars(out);
                b.collect_label_vars(out);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_label_vars(out)),
        }
    }

    /// Recursion constants referenced anywhere in the term.
    pub fn defs(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_defs(&mut out);
        out
    }

    fn collect_defs(&self, out: &mut Vec<String>) {
        match self {
            Term::Def(c) => {
                if !out.contains(c) {
                    out.push(c.clone());
                }
            }
            Term::Var(_) | Term::Nil | Term::Data(_) => {}
            Term::Prefix(_, body) => body.collect_defs(out),
            Term::Choice(a, b) => {
                a.collect_defs(out);
                b.collect_defs(out);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_defs(out)),
        }
    }

    fn level(&self) -> u8 {
        match self {
            Term::App(op, args) if is_infix_name(op) && args.len() == 2 => 1,
            Term::Choice(..) => 2,
            Term::Prefix(..) => 3,
            _ => 4,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        if self.level() < min_level {
            f.write_str("(")?;
            self.fmt_bare(f)?;
            f.write_str(")")
        } else {
            self.fmt_bare(f)
        }
    }

    fn fmt_bare(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Def(v) => f.write_str(v),
            Term::Nil => f.write_str("0"),
            Term::Prefix(l, body) => {
                write!(f, "{l} . ")?;
                body.fmt_at(f, 3)
            }
            Term::Choice(a, b) => {
                a.fmt_at(f, 3)?;
                f.write_str(" + ")?;
                b.fmt_at(f, 2)
            }
            Term::App(op, args) if is_infix_name(op) && args.len() == 2 => {
                args[0].fmt_at(f, 1)?;
                write!(f, " {op} ")?;
                args[1].fmt_at(f, 2)
            }
            Term::App(op, args) => {
                f.write_str(op)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        a.fmt_at(f, 0)?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
            Term::Data(Label::MSet(elems)) if elems.len() == 1 => write!(f, "{}", elems[0]),
            Term::Data(l) => write!(f, "{l}"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_bare(f)
    }
}

/// Operator names made of symbol characters (`||`, `;`) are written infix.
pub fn is_infix_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| !(c.is_alphanumeric() || c == '_' || c == '\''))
}

/// Display form of an operator name: `_||_` for infix operators, the bare name otherwise.
pub fn op_display_name(name: &str) -> String {
    if name == "+" || is_infix_name(name) {
        format!("_{name}_")
    } else {
        name.to_string()
    }
}
