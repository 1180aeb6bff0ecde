//! One-step semantics of closed terms under the spec's rules and the built-in core rules.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::spec::{Rule, Spec};
use crate::terms::{
    canon_data, canon_label, canon_term, extend_label_match, extend_term_match, substitute,
    substitute_label, EquationalTheory, Label, Substitution, Term, TermError,
};

pub const DEFAULT_DEPTH_CAP: usize = 500;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("term is not closed: {0}")]
    OpenTerm(String),
    #[error("unknown recursion constant {0}")]
    UnknownDefConst(String),
    #[error("recursion depth cap {0} exceeded while unfolding definitions")]
    DepthExceeded(usize),
    /// The transitions of the term depend on themselves, as with `p = p + a . 0`.
    #[error("unguarded recursion through {0}")]
    UnguardedRecursion(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// A transition `--label--> target`; the label is canonical, the target is kept as derived.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub label: Label,
    pub target: Term,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "< {} # {} >", self.label, self.target)
    }
}

impl Serialize for Step {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("Step", 2)?;
        st.serialize_field("label", &self.label.to_string())?;
        st.serialize_field("target", &self.target.to_string())?;
        st.end()
    }
}

/// Step computation with a cache private to this value. Reuse one simulator for many
/// queries against the same spec; drop it to release the cache.
pub struct Simulator<'a> {
    spec: &'a Spec,
    theory: EquationalTheory,
    rules: HashMap<&'a str, Vec<&'a Rule>>,
    memo: HashMap<Term, Vec<Step>>,
    active: HashSet<Term>,
    depth_cap: usize,
}

impl<'a> Simulator<'a> {
    pub fn new(spec: &'a Spec) -> Self {
        let mut rules: HashMap<&str, Vec<&Rule>> = HashMap::new();
        for r in &spec.rules {
            if let Some(op) = r.defined_op() {
                rules.entry(op).or_default().push(r);
            }
        }
        Simulator {
            spec,
            theory: spec.theory(),
            rules,
            memo: HashMap::new(),
            active: HashSet::new(),
            depth_cap: DEFAULT_DEPTH_CAP,
        }
    }

    pub fn with_depth_cap(mut self, cap: usize) -> Self {
        self.depth_cap = cap;
        self
    }

    pub fn theory(&self) -> &EquationalTheory {
        &self.theory
    }

    pub fn spec(&self) -> &'a Spec {
        self.spec
    }

    /// All transitions of `p`, deduplicated modulo canonical form and sorted by rendering.
    pub fn step(&mut self, p: &Term) -> Result<Vec<Step>, SimError> {
        if !p.is_closed() {
            return Err(SimError::OpenTerm(p.to_string()));
        }
        self.steps(p, 0)
    }

    fn steps(&mut self, p: &Term, depth: usize) -> Result<Vec<Step>, SimError> {
        if let Some(hit) = self.memo.get(p) {
            return Ok(hit.clone());
        }
        // Step derivation only descends into subterms and definition bodies, so meeting a
        // term again on the current path means the derivation can never bottom out.
        if !self.active.insert(p.clone()) {
            self.active.clear();
            return Err(SimError::UnguardedRecursion(p.to_string()));
        }
        let raw = self.derive(p, depth);
        self.active.remove(p);
        let out = normalize_steps(raw?, &self.theory);
        self.memo.insert(p.clone(), out.clone());
        Ok(out)
    }

    fn derive(&mut self, p: &Term, depth: usize) -> Result<Vec<Step>, SimError> {
        Ok(match p {
            Term::Nil | Term::Data(_) => Vec::new(),
            Term::Var(v) => return Err(SimError::OpenTerm(v.clone())),
            Term::Prefix(l, body) => vec![Step { label: canon_label(l, &self.theory), target: (**body).clone() }],
            Term::Choice(a, b) => {
                let mut out = self.steps(a, depth)?;
                out.extend(self.steps(b, depth)?);
                out
            }
            Term::Def(c) => {
                if depth >= self.depth_cap {
                    return Err(SimError::DepthExceeded(self.depth_cap));
                }
                let body = self.spec.def(c).ok_or_else(|| SimError::UnknownDefConst(c.clone()))?.clone();
                self.steps(&body, depth + 1)?
            }
            Term::App(op, args) => self.apply_rules(op, args, depth)?,
        })
    }

    fn apply_rules(&mut self, op: &str, args: &[Term], depth: usize) -> Result<Vec<Step>, SimError> {
        let rules = self.rules.get(op).cloned().unwrap_or_default();
        let mut out = Vec::new();
        for rule in rules {
            for sub in self.source_matches(rule, args) {
                for sub in self.positive_matches(rule, 0, sub, depth)? {
                    if self.negatives_hold(rule, &sub, depth)? {
                        let label = canon_label(&substitute_label(&rule.conclusion.label, &sub)?, &self.theory);
                        if !label.is_ground() {
                            return Err(SimError::OpenTerm(label.to_string()));
                        }
                        let target = substitute(&rule.conclusion.target, &sub)?;
                        out.push(Step { label, target });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Bind the source variables to the arguments as given, keeping their original layout.
    fn source_matches(&self, rule: &Rule, args: &[Term]) -> Vec<Substitution> {
        let pats = rule.source_args();
        if pats.len() != args.len() {
            return Vec::new();
        }
        let mut subs = vec![Substitution::new()];
        for (p, a) in pats.iter().zip(args) {
            subs = subs
                .into_iter()
                .flat_map(|s| match (p, a) {
                    (Term::Var(x), _) if !s.terms.contains_key(x) => vec![s.with_term(x, a.clone())],
                    (Term::Data(Label::Var(mu, sort)), Term::Data(d))
                        if !s.labels.contains_key(mu) && self.theory.fits(sort, d) =>
                    {
                        vec![s.with_label(mu, canon_data(d, &self.theory))]
                    }
                    _ => extend_term_match(p, a, &self.theory, &s),
                })
                .collect();
        }
        subs
    }

    fn positive_matches(
        &mut self,
        rule: &Rule,
        i: usize,
        sub: Substitution,
        depth: usize,
    ) -> Result<Vec<Substitution>, SimError> {
        let Some(premise) = rule.positives.get(i) else {
            return Ok(vec![sub]);
        };
        let source = substitute(&premise.source, &sub)?;
        let steps = self.steps(&source, depth)?;
        let mut out = Vec::new();
        for st in &steps {
            for s in extend_label_match(&premise.label, &st.label, &self.theory, &sub) {
                let bound = match &premise.target {
                    Term::Var(y) => match s.terms.get(y) {
                        Some(prev) => {
                            if canon_term(prev, &self.theory) == canon_term(&st.target, &self.theory) {
                                vec![s]
                            } else {
                                vec![]
                            }
                        }
                        None => vec![s.with_term(y, st.target.clone())],
                    },
                    pat => extend_term_match(pat, &st.target, &self.theory, &s),
                };
                for b in bound {
                    out.extend(self.positive_matches(rule, i + 1, b, depth)?);
                }
            }
        }
        Ok(out)
    }

    fn negatives_hold(&mut self, rule: &Rule, sub: &Substitution, depth: usize) -> Result<bool, SimError> {
        for n in &rule.negatives {
            let source = substitute(&n.source, sub)?;
            let label = substitute_label(&n.label, sub)?;
            let steps = self.steps(&source, depth)?;
            if steps.iter().any(|st| !extend_label_match(&label, &st.label, &self.theory, sub).is_empty()) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn normalize_steps(raw: Vec<Step>, th: &EquationalTheory) -> Vec<Step> {
    let mut keyed: Vec<(String, String, Step)> = raw
        .into_iter()
        .map(|s| {
            let key = format!("{} # {}", s.label, canon_term(&s.target, th));
            (key, s.to_string(), s)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    keyed.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    keyed.into_iter().map(|(_, _, s)| s).collect()
}

/// All transitions of the closed term `p`.
pub fn step(spec: &Spec, p: &Term) -> Result<Vec<Step>, SimError> {
    Simulator::new(spec).step(p)
}

/// Replace a top-level recursion constant by its body, once.
pub fn unfold(spec: &Spec, p: &Term) -> Result<Term, SimError> {
    if !p.is_closed() {
        return Err(SimError::OpenTerm(p.to_string()));
    }
    match p {
        Term::Def(c) => spec.def(c).cloned().ok_or_else(|| SimError::UnknownDefConst(c.clone())),
        other => Ok(other.clone()),
    }
}

/// Text block in the `Possible steps:` layout, one step per line.
pub fn format_steps(steps: &[Step]) -> String {
    let mut out = String::from("Possible steps:\n");
    for s in steps {
        out.push_str(&format!(" {s}\n"));
    }
    out
}
