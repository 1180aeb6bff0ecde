//! Static checks on specifications: GSOS shape, negative-premise labels, disjoint extension
//! of the core calculus and guarded recursion.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::spec::{Rule, Spec};
use crate::terms::{Label, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationKind {
    NonVariableSource,
    RepeatedVariable,
    PremiseOnNonArgument,
    TargetVarReuse,
    ConclVarEscape,
    NegLabelUnbound,
    RedefinesBccsp,
    UnguardedDef,
    DefOutsideBccsp,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// 1-based rule index; `None` for definition problems.
    pub rule: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub def: Option<String>,
    pub message: String,
    /// The offending sub-expression.
    pub span: String,
}

impl Violation {
    fn rule(kind: ViolationKind, index: usize, span: impl fmt::Display, message: String) -> Self {
        Violation { kind, rule: Some(index + 1), def: None, message, span: span.to_string() }
    }

    fn def(kind: ViolationKind, name: &str, span: impl fmt::Display, message: String) -> Self {
        Violation { kind, rule: None, def: Some(name.to_string()), message, span: span.to_string() }
    }

    fn sort_key(&self) -> (u8, usize, String, ViolationKind) {
        match (&self.rule, &self.def) {
            (Some(r), _) => (0, *r, String::new(), self.kind),
            (None, d) => (1, 0, d.clone().unwrap_or_default(), self.kind),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.rule, &self.def) {
            (Some(r), _) => write!(f, "rule {r}: {}: {}", self.kind, self.message),
            (None, Some(d)) => write!(f, "def {d}: {}: {}", self.kind, self.message),
            (None, None) => write!(f, "{}: {}", self.kind, self.message),
        }
    }
}

/// Arguments of a rule source; prefix and choice count as operators over their operands.
fn source_args(rule: &Rule) -> Vec<&Term> {
    match &rule.conclusion.source {
        Term::App(_, args) => args.iter().collect(),
        Term::Prefix(_, body) => vec![&**body],
        Term::Choice(a, b) => vec![&**a, &**b],
        _ => vec![],
    }
}

fn is_arg_var(t: &Term) -> bool {
    matches!(t, Term::Var(_) | Term::Data(Label::Var(..)))
}

fn arg_var_name(t: &Term) -> Option<&str> {
    match t {
        Term::Var(v) | Term::Data(Label::Var(v, _)) => Some(v),
        _ => None,
    }
}

/// Label and data variables the rule binds before its conclusion is built: those of the
/// source (prefix labels, data arguments) and of the positive premise labels.
fn bound_label_vars(rule: &Rule) -> BTreeSet<String> {
    let mut out: BTreeSet<String> =
        rule.conclusion.source.label_vars().into_iter().map(|(v, _)| v).collect();
    for p in &rule.positives {
        out.extend(p.label.vars().into_iter().map(|(v, _)| v));
    }
    out
}

pub fn check_gsos(spec: &Spec) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, rule) in spec.rules.iter().enumerate() {
        gsos_rule(i, rule, &mut out);
    }
    out
}

fn gsos_rule(i: usize, rule: &Rule, out: &mut Vec<Violation>) {
    use ViolationKind::*;
    let source = &rule.conclusion.source;
    let args = source_args(rule);
    if matches!(source, Term::Var(_) | Term::Def(_) | Term::Data(_)) {
        out.push(Violation::rule(
            NonVariableSource,
            i,
            source,
            format!("conclusion source {source} is not an operator application"),
        ));
    }
    let mut arg_vars: Vec<&str> = Vec::new();
    for a in &args {
        match arg_var_name(a) {
            Some(v) if is_arg_var(a) => {
                if arg_vars.contains(&v) {
                    out.push(Violation::rule(
                        RepeatedVariable,
                        i,
                        source,
                        format!("variable {v} occurs more than once in {source}"),
                    ));
                } else {
                    arg_vars.push(v);
                }
            }
            _ => out.push(Violation::rule(
                NonVariableSource,
                i,
                a,
                format!("argument {a} of {source} is not a variable"),
            )),
        }
    }
    let premise_sources =
        rule.positives.iter().map(|p| &p.source).chain(rule.negatives.iter().map(|n| &n.source));
    for ps in premise_sources {
        let ok = matches!(ps, Term::Var(v) if arg_vars.contains(&v.as_str()));
        if !ok {
            out.push(Violation::rule(
                PremiseOnNonArgument,
                i,
                ps,
                format!("premise source {ps} is not an argument variable of {source}"),
            ));
        }
    }
    let mut targets: Vec<&str> = Vec::new();
    for p in &rule.positives {
        match &p.target {
            Term::Var(y) if !arg_vars.contains(&y.as_str()) && !targets.contains(&y.as_str()) => {
                targets.push(y)
            }
            t => out.push(Violation::rule(
                TargetVarReuse,
                i,
                t,
                format!("premise target {t} is not a fresh variable"),
            )),
        }
    }
    for v in rule.conclusion.target.proc_vars() {
        if !arg_vars.contains(&v.as_str()) && !targets.contains(&v.as_str()) {
            out.push(Violation::rule(
                ConclVarEscape,
                i,
                &rule.conclusion.target,
                format!("conclusion target uses {v}, which neither the source nor a premise binds"),
            ));
        }
    }
    let bound = bound_label_vars(rule);
    let mut concl_labels = rule.conclusion.label.vars();
    rule.conclusion.target.collect_label_vars(&mut concl_labels);
    for (v, _) in concl_labels {
        if !bound.contains(&v) {
            out.push(Violation::rule(
                ConclVarEscape,
                i,
                &rule.conclusion.label,
                format!("label variable {v} in the conclusion is not bound by a positive premise"),
            ));
        }
    }
}

pub fn check_negative_labels(spec: &Spec) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, rule) in spec.rules.iter().enumerate() {
        let bound = bound_label_vars(rule);
        for n in &rule.negatives {
            for (v, _) in n.label.vars() {
                if !bound.contains(&v) {
                    out.push(Violation::rule(
                        ViolationKind::NegLabelUnbound,
                        i,
                        n,
                        format!("label variable {v} of a negative premise occurs in no positive premise"),
                    ));
                }
            }
        }
    }
    out
}

/// Whether a user rule for a core operator is one of the standard prefix or choice rules,
/// up to variable names. Such rules add nothing and are accepted.
pub fn is_standard_bccsp_rule(rule: &Rule) -> bool {
    let c = &rule.conclusion;
    match (&c.source, &c.label, &c.target) {
        (Term::Prefix(Label::Var(l, _), body), Label::Var(l2, _), Term::Var(x2)) => {
            rule.positives.is_empty()
                && rule.negatives.is_empty()
                && l == l2
                && matches!(&**body, Term::Var(x) if x == x2)
        }
        (Term::Choice(a, b), Label::Var(l, _), Term::Var(target)) => {
            let ([p], []) = (rule.positives.as_slice(), rule.negatives.as_slice()) else {
                return false;
            };
            let (Term::Var(x), Term::Var(y)) = (&**a, &**b) else { return false };
            if x == y {
                return false;
            }
            let tested = match &p.source {
                Term::Var(s) if s == x || s == y => s,
                _ => return false,
            };
            matches!(&p.label, Label::Var(pl, _) if pl == l)
                && matches!(&p.target, Term::Var(t) if t == target && t != x && t != y)
                && (tested == x || tested == y)
        }
        _ => false,
    }
}

pub fn check_disjoint_extension(spec: &Spec) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, rule) in spec.rules.iter().enumerate() {
        if rule.defines_builtin() && !is_standard_bccsp_rule(rule) {
            out.push(Violation::rule(
                ViolationKind::RedefinesBccsp,
                i,
                &rule.conclusion.source,
                format!("rule adds behaviour to the core operator of {}", rule.conclusion.source),
            ));
        }
    }
    out
}

fn unguarded_defs(t: &Term, out: &mut Vec<String>) {
    match t {
        Term::Def(c) => out.push(c.clone()),
        Term::Choice(a, b) => {
            unguarded_defs(a, out);
            unguarded_defs(b, out);
        }
        Term::App(_, args) => args.iter().for_each(|a| unguarded_defs(a, out)),
        Term::Prefix(..) | Term::Nil | Term::Var(_) | Term::Data(_) => {}
    }
}

pub fn check_guarded_defs(spec: &Spec) -> Vec<Violation> {
    let mut out = Vec::new();
    for (name, body) in &spec.defs {
        if !body.is_bccsp(true) {
            out.push(Violation::def(
                ViolationKind::DefOutsideBccsp,
                name,
                body,
                format!("body of {name} uses operators other than 0, prefix and choice"),
            ));
        }
        let mut free = Vec::new();
        unguarded_defs(body, &mut free);
        free.dedup();
        for c in free {
            out.push(Violation::def(
                ViolationKind::UnguardedDef,
                name,
                body,
                format!("{c} occurs in the body of {name} outside any prefix"),
            ));
        }
    }
    out
}

/// All checks, ordered by rule index (definitions last) and then by kind.
pub fn validate(spec: &Spec) -> Vec<Violation> {
    let mut all = check_gsos(spec);
    all.extend(check_negative_labels(spec));
    all.extend(check_disjoint_extension(spec));
    all.extend(check_guarded_defs(spec));
    all.sort_by_key(|v| v.sort_key());
    all
}

/// Violations that make rule-driven analyses unsound; guardedness problems are excluded.
pub fn rule_errors(spec: &Spec) -> Vec<Violation> {
    validate(spec)
        .into_iter()
        .filter(|v| !matches!(v.kind, ViolationKind::UnguardedDef | ViolationKind::DefOutsideBccsp))
        .collect()
}
