//! Expansion of user operators into core-calculus normal forms, one summand per rule instance.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spec::{Rule, Spec};
use crate::terms::{
    canon_data, canon_label, canon_process, canon_term, extend_label_match, extend_term_match, substitute,
    substitute_label, summands, EquationalTheory, Label, Substitution, Term, TermError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("term not semantically well-founded within budget ({0})")]
    BudgetExceeded(String),
    #[error("term is not closed: {0}")]
    OpenTerm(String),
    #[error("argument is not a head normal form: {0}")]
    NonHnfArgument(String),
    #[error("recursion constants cannot be normalized: {0}")]
    DefConst(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizeBudget {
    /// Rule instances that may be expanded into summands.
    pub max_rewrites: usize,
    /// Nesting of operator applications being expanded at once.
    pub max_depth: usize,
}

impl Default for NormalizeBudget {
    fn default() -> Self {
        NormalizeBudget { max_rewrites: 10_000, max_depth: 500 }
    }
}

/// Substitutions under which `rule` fires on arguments already in head normal form. Positive
/// premises are witnessed by summands of the tested argument; negative premises require that
/// no summand carries the forbidden label.
pub fn satisfies(
    args: &[Term],
    rule: &Rule,
    th: &EquationalTheory,
) -> Result<Vec<Substitution>, AxiomError> {
    let pats = rule.source_args();
    if pats.len() != args.len() {
        return Ok(Vec::new());
    }
    let mut subs = vec![Substitution::new()];
    for (p, a) in pats.iter().zip(args) {
        let mut next = Vec::new();
        for s in subs {
            match (p, a) {
                (Term::Var(x), _) if !s.terms.contains_key(x) => {
                    let hnf = canon_process(a, th).map_err(|_| AxiomError::NonHnfArgument(a.to_string()))?;
                    next.push(s.with_term(x, hnf));
                }
                (Term::Data(Label::Var(mu, sort)), Term::Data(d))
                    if !s.labels.contains_key(mu) && th.fits(sort, d) =>
                {
                    next.push(s.with_label(mu, canon_data(d, th)));
                }
                _ => next.extend(extend_term_match(p, a, th, &s)),
            }
        }
        subs = next;
    }
    let mut out = Vec::new();
    for s in subs {
        for s in positive_witnesses(rule, 0, s, th)? {
            if negatives_hold(rule, &s, th)? {
                out.push(s);
            }
        }
    }
    Ok(out)
}

fn summands_of(t: &Term, th: &EquationalTheory) -> Result<Vec<(Label, Term)>, AxiomError> {
    summands(t, th).map_err(|_| AxiomError::NonHnfArgument(t.to_string()))
}

fn positive_witnesses(
    rule: &Rule,
    i: usize,
    sub: Substitution,
    th: &EquationalTheory,
) -> Result<Vec<Substitution>, AxiomError> {
    let Some(premise) = rule.positives.get(i) else {
        return Ok(vec![sub]);
    };
    let source = substitute(&premise.source, &sub)?;
    let mut out = Vec::new();
    for (l, body) in summands_of(&source, th)? {
        for s in extend_label_match(&premise.label, &l, th, &sub) {
            let bound = match &premise.target {
                Term::Var(y) => match s.terms.get(y) {
                    Some(prev) if canon_term(prev, th) != body => vec![],
                    Some(_) => vec![s],
                    None => vec![s.with_term(y, body.clone())],
                },
                pat => extend_term_match(pat, &body, th, &s),
            };
            for b in bound {
                out.extend(positive_witnesses(rule, i + 1, b, th)?);
            }
        }
    }
    Ok(out)
}

fn negatives_hold(rule: &Rule, sub: &Substitution, th: &EquationalTheory) -> Result<bool, AxiomError> {
    for n in &rule.negatives {
        let source = substitute(&n.source, sub)?;
        let label = substitute_label(&n.label, sub)?;
        let blocked = summands_of(&source, th)?
            .iter()
            .any(|(l, _)| !extend_label_match(&label, l, th, sub).is_empty());
        if blocked {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Bottom-up normalizer; the memo lives as long as the value.
pub struct Normalizer<'a> {
    theory: EquationalTheory,
    rules: HashMap<&'a str, Vec<&'a Rule>>,
    memo: HashMap<Term, Term>,
    budget: NormalizeBudget,
    rewrites: usize,
}

impl<'a> Normalizer<'a> {
    pub fn new(spec: &'a Spec, budget: NormalizeBudget) -> Self {
        let mut rules: HashMap<&str, Vec<&Rule>> = HashMap::new();
        for r in &spec.rules {
            if let Some(op) = r.defined_op() {
                rules.entry(op).or_default().push(r);
            }
        }
        Normalizer { theory: spec.theory(), rules, memo: HashMap::new(), budget, rewrites: 0 }
    }

    /// Core-calculus normal form of `p`, canonical modulo the core equations.
    pub fn normalize(&mut self, p: &Term) -> Result<Term, AxiomError> {
        if !p.is_closed() {
            return Err(AxiomError::OpenTerm(p.to_string()));
        }
        let nf = self.norm(p, 0)?;
        Ok(canon_process(&nf, &self.theory)?)
    }

    fn norm(&mut self, t: &Term, depth: usize) -> Result<Term, AxiomError> {
        if depth > self.budget.max_depth {
            return Err(AxiomError::BudgetExceeded(format!("depth {}", self.budget.max_depth)));
        }
        let key = canon_term(t, &self.theory);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let out = match &key {
            Term::Nil | Term::Data(_) => key.clone(),
            Term::Var(v) => return Err(AxiomError::OpenTerm(v.clone())),
            Term::Def(c) => return Err(AxiomError::DefConst(c.clone())),
            Term::Prefix(l, body) => Term::prefix(l.clone(), self.norm(body, depth)?),
            Term::Choice(a, b) => {
                let sum = Term::choice(self.norm(a, depth)?, self.norm(b, depth)?);
                canon_term(&sum, &self.theory)
            }
            Term::App(op, args) => {
                let args = args.iter().map(|a| self.norm(a, depth + 1)).collect::<Result<Vec<_>, _>>()?;
                self.expand(op, &args, depth)?
            }
        };
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    fn expand(&mut self, op: &str, args: &[Term], depth: usize) -> Result<Term, AxiomError> {
        let rules = self.rules.get(op).cloned().unwrap_or_default();
        let mut parts = Vec::new();
        for rule in rules {
            for sub in satisfies(args, rule, &self.theory)? {
                self.rewrites += 1;
                if self.rewrites > self.budget.max_rewrites {
                    return Err(AxiomError::BudgetExceeded(format!("{} rewrites", self.budget.max_rewrites)));
                }
                let label = canon_label(&substitute_label(&rule.conclusion.label, &sub)?, &self.theory);
                if !label.is_ground() {
                    return Err(AxiomError::OpenTerm(label.to_string()));
                }
                let target = substitute(&rule.conclusion.target, &sub)?;
                parts.push(Term::prefix(label, self.norm(&target, depth + 1)?));
            }
        }
        Ok(canon_term(&Term::sum(parts), &self.theory))
    }
}

pub fn normalize(spec: &Spec, p: &Term, budget: NormalizeBudget) -> Result<Term, AxiomError> {
    Normalizer::new(spec, budget).normalize(p)
}

/// One instance of the expansion schema: the summand a rule contributes and when it does.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomEntry {
    /// 1-based position of the rule in the spec.
    pub rule: usize,
    pub summand: String,
    pub conditions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpAxioms {
    pub op: String,
    /// Left-hand side of the expansion, e.g. `x || y`.
    #[serde(skip)]
    pub lhs: String,
    pub axioms: Vec<AxiomEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AxiomReport {
    pub ops: Vec<OpAxioms>,
}

pub fn axiom_report(spec: &Spec) -> AxiomReport {
    let ops = spec
        .proc_ops
        .iter()
        .map(|op| {
            let mut lhs = None;
            let axioms = spec
                .rules_for(&op.name)
                .map(|(i, r)| {
                    lhs.get_or_insert_with(|| r.conclusion.source.to_string());
                    let summand = Term::prefix(r.conclusion.label.clone(), r.conclusion.target.clone());
                    let mut conditions: Vec<String> = r
                        .positives
                        .iter()
                        .map(|p| {
                            let s = Term::prefix(p.label.clone(), p.target.clone());
                            format!("{} has summand {s}", p.source)
                        })
                        .collect();
                    conditions.extend(r.negatives.iter().map(|n| format!("{} cannot do {}", n.source, n.label)));
                    AxiomEntry { rule: i + 1, summand: summand.to_string(), conditions }
                })
                .collect();
            let lhs = lhs.unwrap_or_else(|| {
                let params: Vec<Term> = (1..=op.arity).map(|k| Term::var(&format!("p{k}"))).collect();
                Term::app(&op.name, params).to_string()
            });
            OpAxioms { op: crate::terms::op_display_name(&op.name), lhs, axioms }
        })
        .collect();
    AxiomReport { ops }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            writeln!(f, "{}:", op.op)?;
            if op.axioms.is_empty() {
                writeln!(f, "  {} = 0", op.lhs)?;
            }
            for a in &op.axioms {
                writeln!(f, "  rule {}: {} = {} + ...", a.rule, op.lhs, a.summand)?;
                for c in &a.conditions {
                    writeln!(f, "    when {c}")?;
                }
            }
        }
        Ok(())
    }
}
