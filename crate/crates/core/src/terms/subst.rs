use std::collections::BTreeMap;
use std::fmt;

use super::syntax::{Label, Sort, Term};
use super::TermError;

/// Simultaneous substitution for process variables and label (or data) variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution {
    pub terms: BTreeMap<String, Term>,
    pub labels: BTreeMap<String, Label>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.labels.is_empty()
    }

    pub fn term(&self, var: &str) -> Option<&Term> {
        self.terms.get(var)
    }

    pub fn label(&self, var: &str) -> Option<&Label> {
        self.labels.get(var)
    }

    pub fn with_term(mut self, var: &str, t: Term) -> Self {
        self.terms.insert(var.to_string(), t);
        self
    }

    pub fn with_label(mut self, var: &str, l: Label) -> Self {
        self.labels.insert(var.to_string(), l);
        self
    }

    /// `self ∘ inner`: apply `inner` first, then `self`.
    pub fn compose(&self, inner: &Substitution) -> Result<Substitution, TermError> {
        let mut out = Substitution::new();
        for (v, t) in &inner.terms {
            out.terms.insert(v.clone(), substitute(t, self)?);
        }
        for (v, l) in &inner.labels {
            out.labels.insert(v.clone(), substitute_label(l, self)?);
        }
        for (v, t) in &self.terms {
            out.terms.entry(v.clone()).or_insert_with(|| t.clone());
        }
        for (v, l) in &self.labels {
            out.labels.entry(v.clone()).or_insert_with(|| l.clone());
        }
        Ok(out)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        let labels = self.labels.iter().map(|(k, v)| (k, v.to_string()));
        let terms = self.terms.iter().map(|(k, v)| (k, v.to_string()));
        for (k, v) in labels.chain(terms) {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{k} <- {v}")?;
        }
        f.write_str("}")
    }
}

/// Kind-level sort check that needs no signature: actions only for action variables,
/// data only for data variables.
fn check_sort(var: &str, sort: &Sort, image: &Label) -> Result<(), TermError> {
    let ok = match (sort, image) {
        (_, Label::Var(_, s)) => sort.accepts(s),
        (Sort::Action, l) => matches!(l, Label::Action(_)),
        (Sort::Predicate, l) => matches!(l, Label::Predicate(_)),
        (Sort::Label, l) => !matches!(l, Label::Const(_) | Label::MSet(_)),
        (Sort::Data(_), l) => matches!(l, Label::Const(_) | Label::MSet(_)),
    };
    if ok {
        Ok(())
    } else {
        Err(TermError::SortError {
            var: var.to_string(),
            expected: sort.clone(),
            found: image.to_string(),
        })
    }
}

pub fn substitute_label(l: &Label, s: &Substitution) -> Result<Label, TermError> {
    Ok(match l {
        Label::Var(name, sort) => match s.labels.get(name) {
            Some(image) => {
                check_sort(name, sort, image)?;
                image.clone()
            }
            None => l.clone(),
        },
        Label::Action(_) | Label::Predicate(_) | Label::Const(_) => l.clone(),
        Label::App(op, args) => Label::App(
            op.clone(),
            args.iter().map(|a| substitute_label(a, s)).collect::<Result<_, _>>()?,
        ),
        Label::MSet(elems) => {
            Label::MSet(elems.iter().map(|a| substitute_label(a, s)).collect::<Result<_, _>>()?)
        }
        Label::Triple(pre, post) => Label::Triple(
            Box::new(substitute_label(pre, s)?),
            Box::new(substitute_label(post, s)?),
        ),
    })
}

/// Replace every bound variable of `t`; unbound variables pass through unchanged.
pub fn substitute(t: &Term, s: &Substitution) -> Result<Term, TermError> {
    Ok(match t {
        Term::Var(v) => s.terms.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Nil | Term::Def(_) => t.clone(),
        Term::Data(l) => Term::Data(substitute_label(l, s)?),
        Term::Prefix(l, body) => Term::prefix(substitute_label(l, s)?, substitute(body, s)?),
        Term::Choice(a, b) => Term::choice(substitute(a, s)?, substitute(b, s)?),
        Term::App(op, args) => Term::App(
            op.clone(),
            args.iter().map(|a| substitute(a, s)).collect::<Result<_, _>>()?,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitutes_choice() {
        let t = Term::choice(Term::var("x"), Term::var("y"));
        let s = Substitution::new()
            .with_term("x", Term::prefix(Label::action("a"), Term::Nil))
            .with_term("y", Term::Nil);
        assert_eq!(substitute(&t, &s).unwrap().to_string(), "a . 0 + 0");
    }

    #[test]
    fn instantiates_prefix_rule() {
        let t = Term::prefix(Label::var("l", Sort::Label), Term::var("x"));
        let s = Substitution::new()
            .with_label("l", Label::action("a"))
            .with_term("x", Term::Nil);
        let out = substitute(&t, &s).unwrap();
        assert_eq!(out.to_string(), "a . 0");
        assert!(out.is_closed());
    }

    #[test]
    fn empty_substitution_is_identity() {
        let t = Term::var("x");
        assert_eq!(substitute(&t, &Substitution::new()).unwrap(), t);
    }

    #[test]
    fn action_variable_rejects_predicate() {
        let t = Term::prefix(Label::var("alpha", Sort::Action), Term::Nil);
        let s = Substitution::new().with_label("alpha", Label::predicate("|"));
        assert!(matches!(substitute(&t, &s), Err(TermError::SortError { .. })));
    }

    #[test]
    fn data_variable_rejects_action() {
        let t = Term::Data(Label::var("mu", Sort::Data("Data".into())));
        let s = Substitution::new().with_label("mu", Label::action("a"));
        assert!(substitute(&t, &s).is_err());
    }
}
