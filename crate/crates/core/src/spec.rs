//! Transition system specifications: declarations, GSOS rules and recursive definitions.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::terms::{EquationalTheory, Label, OpAttrs, Sort, Term};

/// Line and column, both 1-based.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// `source -(label)-> target`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub source: Term,
    pub label: Label,
    pub target: Term,
}

/// `source -(label)/>`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NegPremise {
    pub source: Term,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub positives: Vec<Transition>,
    pub negatives: Vec<NegPremise>,
    pub conclusion: Transition,
}

impl Rule {
    /// Name of the user operator this rule defines, if its source is an application.
    pub fn defined_op(&self) -> Option<&str> {
        match &self.conclusion.source {
            Term::App(op, _) => Some(op),
            _ => None,
        }
    }

    /// Whether the conclusion source is `0`, a prefix or a choice.
    pub fn defines_builtin(&self) -> bool {
        matches!(self.conclusion.source, Term::Nil | Term::Prefix(..) | Term::Choice(..))
    }

    /// Variables of the conclusion source, in argument order.
    pub fn source_args(&self) -> &[Term] {
        match &self.conclusion.source {
            Term::App(_, args) => args,
            _ => &[],
        }
    }

    pub fn proc_vars(&self) -> Vec<String> {
        let mut out = self.conclusion.source.proc_vars();
        let mut push = |v: String| {
            if !out.contains(&v) {
                out.push(v);
            }
        };
        for p in &self.positives {
            p.source.proc_vars().into_iter().for_each(&mut push);
            p.target.proc_vars().into_iter().for_each(&mut push);
        }
        for n in &self.negatives {
            n.source.proc_vars().into_iter().for_each(&mut push);
        }
        self.conclusion.target.proc_vars().into_iter().for_each(&mut push);
        out
    }

    pub fn label_vars(&self) -> Vec<(String, Sort)> {
        let mut out = Vec::new();
        self.conclusion.source.collect_label_vars(&mut out);
        for p in &self.positives {
            p.label.collect_vars(&mut out);
            p.target.collect_label_vars(&mut out);
        }
        for n in &self.negatives {
            n.label.collect_vars(&mut out);
        }
        self.conclusion.label.collect_vars(&mut out);
        self.conclusion.target.collect_label_vars(&mut out);
        out
    }

    /// Premises as display strings, positives first.
    pub fn premise_strings(&self) -> Vec<String> {
        self.positives
            .iter()
            .map(|p| p.to_string())
            .chain(self.negatives.iter().map(|n| n.to_string()))
            .collect()
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -({})-> {}", self.source, self.label, self.target)
    }
}

impl fmt::Display for NegPremise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -({})/>", self.source, self.label)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let premises = self.premise_strings();
        if premises.is_empty() {
            write!(f, "==> {}", self.conclusion)
        } else {
            write!(f, "{} ==> {}", premises.join(", "), self.conclusion)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataSort {
    pub name: String,
    pub attrs: OpAttrs,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelOp {
    pub name: String,
    pub args: Vec<Sort>,
    pub result: Sort,
    pub attrs: OpAttrs,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcOp {
    pub name: String,
    pub arity: usize,
    /// Declared `[comm]`.
    pub comm: bool,
}

/// Sort of a declared variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarSort {
    Proc,
    Label(Sort),
}

impl fmt::Display for VarSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarSort::Proc => f.write_str("Proc"),
            VarSort::Label(s) => write!(f, "{s}"),
        }
    }
}

/// Source positions of rules and definitions; not part of a spec's identity.
#[derive(Clone, Debug, Default)]
pub struct SourceMap {
    pub rules: Vec<Pos>,
    pub defs: BTreeMap<String, Pos>,
}

/// A complete transition system specification.
#[derive(Clone, Debug, Default)]
pub struct Spec {
    pub name: String,
    pub actions: Vec<String>,
    pub predicates: Vec<String>,
    pub data_sorts: Vec<DataSort>,
    /// Data constants with their sort, excluding multiset identities.
    pub data_consts: Vec<(String, String)>,
    pub label_ops: Vec<LabelOp>,
    pub proc_ops: Vec<ProcOp>,
    pub variables: BTreeMap<String, VarSort>,
    pub rules: Vec<Rule>,
    pub defs: BTreeMap<String, Term>,
    pub source_map: SourceMap,
}

impl PartialEq for Spec {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.actions == other.actions
            && self.predicates == other.predicates
            && self.data_sorts == other.data_sorts
            && self.data_consts == other.data_consts
            && self.label_ops == other.label_ops
            && self.proc_ops == other.proc_ops
            && self.variables == other.variables
            && self.rules == other.rules
            && self.defs == other.defs
    }
}

impl Eq for Spec {}

impl Spec {
    pub fn theory(&self) -> EquationalTheory {
        let mut th = EquationalTheory::new();
        for ds in &self.data_sorts {
            if let Some(id) = &ds.attrs.identity {
                th.add_multiset_identity(id, &ds.name);
            }
        }
        for (c, sort) in &self.data_consts {
            th.add_data_const(c, sort);
        }
        for op in &self.label_ops {
            th.add_label_op(&op.name, op.attrs.clone(), op.result.clone());
        }
        th
    }

    pub fn proc_op(&self, name: &str) -> Option<&ProcOp> {
        self.proc_ops.iter().find(|o| o.name == name)
    }

    /// Rules defining `op`, with their 0-based indices.
    pub fn rules_for<'a>(&'a self, op: &'a str) -> impl Iterator<Item = (usize, &'a Rule)> + 'a {
        self.rules
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.defined_op() == Some(op))
    }

    pub fn binary_ops(&self) -> impl Iterator<Item = &ProcOp> {
        self.proc_ops.iter().filter(|o| o.arity == 2)
    }

    pub fn def(&self, name: &str) -> Option<&Term> {
        self.defs.get(name)
    }

    pub fn rule_pos(&self, index: usize) -> Option<Pos> {
        self.source_map.rules.get(index).copied()
    }
}

fn fmt_attrs(f: &mut fmt::Formatter<'_>, attrs: &OpAttrs) -> fmt::Result {
    let mut parts = Vec::new();
    if attrs.assoc {
        parts.push("assoc".to_string());
    }
    if attrs.comm {
        parts.push("comm".to_string());
    }
    if let Some(id) = &attrs.identity {
        parts.push(format!("id: {id}"));
    }
    if parts.is_empty() {
        Ok(())
    } else {
        write!(f, " [{}]", parts.join(" "))
    }
}

/// Renders the spec in the input language; parsing the output yields an equal spec.
impl fmt::Display for Spec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "spec {}", self.name)?;
        if !self.actions.is_empty() {
            writeln!(f, "actions {} ;", self.actions.join(" "))?;
        }
        if !self.predicates.is_empty() {
            writeln!(f, "predicates {} ;", self.predicates.join(" "))?;
        }
        for ds in &self.data_sorts {
            write!(f, "datasort {}", ds.name)?;
            fmt_attrs(f, &ds.attrs)?;
            writeln!(f, " ;")?;
        }
        let mut by_sort: Vec<(&str, Vec<&str>)> = Vec::new();
        for (c, s) in &self.data_consts {
            match by_sort.iter_mut().find(|(sort, _)| sort == s) {
                Some((_, names)) => names.push(c),
                None => by_sort.push((s, vec![c])),
            }
        }
        for (sort, names) in by_sort {
            writeln!(f, "dataconst {} : {sort} ;", names.join(" "))?;
        }
        for op in &self.label_ops {
            write!(f, "labelop {} :", op.name)?;
            for a in &op.args {
                write!(f, " {a}")?;
            }
            write!(f, " -> {}", op.result)?;
            fmt_attrs(f, &OpAttrs { comm: op.attrs.comm, assoc: op.attrs.assoc, identity: op.attrs.identity.clone() })?;
            writeln!(f, " ;")?;
        }
        for op in &self.proc_ops {
            let name = crate::terms::op_display_name(&op.name);
            write!(f, "op {name} : {}", op.arity)?;
            if op.comm {
                write!(f, " [comm]")?;
            }
            writeln!(f, " ;")?;
        }
        let mut var_groups: Vec<(&VarSort, Vec<&str>)> = Vec::new();
        for (v, s) in &self.variables {
            match var_groups.iter_mut().find(|(sort, _)| *sort == s) {
                Some((_, names)) => names.push(v),
                None => var_groups.push((s, vec![v])),
            }
        }
        for (sort, names) in var_groups {
            writeln!(f, "var {} : {sort} ;", names.join(" "))?;
        }
        for r in &self.rules {
            writeln!(f, "rule {r} ;")?;
        }
        for (name, body) in &self.defs {
            writeln!(f, "def {name} = {body} ;")?;
        }
        Ok(())
    }
}
