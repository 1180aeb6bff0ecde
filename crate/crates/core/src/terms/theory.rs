use std::collections::{BTreeMap, BTreeSet};

use super::syntax::{Label, Sort, Term};
use super::TermError;

/// Equational attributes of a label operator.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OpAttrs {
    pub comm: bool,
    pub assoc: bool,
    pub identity: Option<String>,
}

/// The label algebra a spec declares, plus the sort information needed to check bindings.
///
/// Choice on process terms is always commutative, associative and idempotent with `0` as
/// unit; that part of the theory is built into [`canon_process`] and [`canon_term`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EquationalTheory {
    label_ops: BTreeMap<String, (OpAttrs, Sort)>,
    data_consts: BTreeMap<String, String>,
    identities: BTreeSet<String>,
}

impl EquationalTheory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_label_op(&mut self, name: &str, attrs: OpAttrs, result: Sort) {
        self.label_ops.insert(name.to_string(), (attrs, result));
    }

    pub fn add_data_const(&mut self, name: &str, sort: &str) {
        self.data_consts.insert(name.to_string(), sort.to_string());
    }

    /// Register `name` as the empty multiset of its data sort.
    pub fn add_multiset_identity(&mut self, name: &str, sort: &str) {
        self.identities.insert(name.to_string());
        self.add_data_const(name, sort);
    }

    pub fn label_op(&self, name: &str) -> Option<&OpAttrs> {
        self.label_ops.get(name).map(|(a, _)| a)
    }

    pub fn is_comm(&self, name: &str) -> bool {
        self.label_op(name).is_some_and(|a| a.comm)
    }

    pub fn sort_of(&self, label: &Label) -> Option<Sort> {
        match label {
            Label::Action(_) => Some(Sort::Action),
            Label::Predicate(_) => Some(Sort::Predicate),
            Label::Triple(..) => Some(Sort::Label),
            Label::Var(_, s) => Some(s.clone()),
            Label::Const(c) => self.data_consts.get(c).map(|s| Sort::Data(s.clone())),
            Label::App(op, _) => self.label_ops.get(op).map(|(_, s)| s.clone()),
            Label::MSet(elems) => elems.iter().find_map(|e| self.sort_of(e)),
        }
    }

    /// Whether `image` may be bound to a variable of sort `sort`.
    pub fn fits(&self, sort: &Sort, image: &Label) -> bool {
        match (sort, image) {
            (Sort::Data(_), Label::MSet(elems)) => elems.iter().all(|e| self.fits(sort, e)),
            _ => match self.sort_of(image) {
                Some(found) => sort.accepts(&found),
                None => !sort.is_data() && !matches!(sort, Sort::Action | Sort::Predicate),
            },
        }
    }
}

/// Canonical representative of `l` modulo the declared label attributes.
///
/// Multisets are flattened, stripped of the empty element and sorted; inside store triples
/// a lone data constant becomes a singleton multiset.
pub fn canon_label(l: &Label, th: &EquationalTheory) -> Label {
    match l {
        Label::Action(_) | Label::Predicate(_) | Label::Const(_) | Label::Var(..) => l.clone(),
        Label::MSet(_) => canon_data(l, th),
        Label::Triple(pre, post) => {
            Label::Triple(Box::new(canon_data(pre, th)), Box::new(canon_data(post, th)))
        }
        Label::App(op, args) => {
            let mut args: Vec<Label> = args.iter().map(|a| canon_label(a, th)).collect();
            let Some(attrs) = th.label_op(op) else {
                return Label::App(op.clone(), args);
            };
            if attrs.assoc {
                args = args
                    .into_iter()
                    .flat_map(|a| match a {
                        Label::App(inner, inner_args) if &inner == op => inner_args,
                        other => vec![other],
                    })
                    .collect();
            }
            if let Some(id) = &attrs.identity {
                if attrs.assoc || args.len() == 2 {
                    let is_id = |a: &Label| is_named_const(a, id);
                    args.retain(|a| !is_id(a));
                    match args.len() {
                        0 => return identity_label(id, th),
                        1 => return args.pop().unwrap(),
                        _ => {}
                    }
                }
            }
            if attrs.comm {
                sort_by_rendering(&mut args);
            }
            Label::App(op.clone(), args)
        }
    }
}

fn is_named_const(l: &Label, name: &str) -> bool {
    matches!(l, Label::Action(n) | Label::Predicate(n) | Label::Const(n) if n == name)
        || matches!(l, Label::App(n, args) if n == name && args.is_empty())
}

fn identity_label(id: &str, th: &EquationalTheory) -> Label {
    if th.data_consts.contains_key(id) {
        Label::Const(id.to_string())
    } else {
        Label::App(id.to_string(), vec![])
    }
}

/// Canonical form of a label in a data position (multiset sorts).
pub fn canon_data(l: &Label, th: &EquationalTheory) -> Label {
    match l {
        Label::Const(c) if th.identities.contains(c) => Label::MSet(vec![]),
        Label::Const(_) => Label::MSet(vec![l.clone()]),
        Label::MSet(elems) => {
            let mut flat = Vec::new();
            flatten_mset(elems, th, &mut flat);
            if flat.len() == 1 && matches!(flat[0], Label::Var(..)) {
                return flat.pop().unwrap();
            }
            sort_by_rendering(&mut flat);
            Label::MSet(flat)
        }
        other => canon_label(other, th),
    }
}

fn flatten_mset(elems: &[Label], th: &EquationalTheory, out: &mut Vec<Label>) {
    for e in elems {
        match e {
            Label::MSet(inner) => flatten_mset(inner, th, out),
            Label::Const(c) if th.identities.contains(c) => {}
            other => out.push(canon_label(other, th)),
        }
    }
}

fn sort_by_rendering(items: &mut [Label]) {
    items.sort_by_cached_key(|x| x.to_string());
}

/// E_BCCSP normal form of a closed BCCSP term (recursion constants pass through as atoms).
pub fn canon_process(t: &Term, th: &EquationalTheory) -> Result<Term, TermError> {
    if let Some(bad) = first_non_bccsp(t) {
        return Err(TermError::NonBccspTerm(bad.to_string()));
    }
    Ok(canon_term(t, th))
}

fn first_non_bccsp(t: &Term) -> Option<&Term> {
    match t {
        Term::Nil | Term::Def(_) => None,
        Term::Prefix(_, body) => first_non_bccsp(body),
        Term::Choice(a, b) => first_non_bccsp(a).or_else(|| first_non_bccsp(b)),
        Term::Var(_) | Term::App(..) | Term::Data(_) => Some(t),
    }
}

/// Canonical form of an arbitrary term: every sum is flattened, stripped of `0`, sorted by
/// rendering and deduplicated; labels are canonical. User operators keep their argument order.
pub fn canon_term(t: &Term, th: &EquationalTheory) -> Term {
    match t {
        Term::Var(_) | Term::Nil | Term::Def(_) => t.clone(),
        Term::Data(l) => Term::Data(canon_data(l, th)),
        Term::Prefix(l, body) => Term::prefix(canon_label(l, th), canon_term(body, th)),
        Term::App(op, args) => Term::App(op.clone(), args.iter().map(|a| canon_term(a, th)).collect()),
        Term::Choice(..) => {
            let mut parts = Vec::new();
            collect_summands(t, &mut parts);
            let mut keyed: Vec<(String, Term)> = parts
                .into_iter()
                .map(|s| canon_term(s, th))
                .filter(|s| *s != Term::Nil)
                .map(|s| (s.to_string(), s))
                .collect();
            keyed.sort_by(|a, b| a.0.cmp(&b.0));
            keyed.dedup_by(|a, b| a.0 == b.0);
            Term::sum(keyed.into_iter().map(|(_, s)| s))
        }
    }
}

fn collect_summands<'a>(t: &'a Term, out: &mut Vec<&'a Term>) {
    match t {
        Term::Choice(a, b) => {
            collect_summands(a, out);
            collect_summands(b, out);
        }
        other => out.push(other),
    }
}

/// The prefixed summands of a closed head normal form, in canonical order.
pub fn summands(t: &Term, th: &EquationalTheory) -> Result<Vec<(Label, Term)>, TermError> {
    let canon = canon_process(t, th)?;
    let mut parts = Vec::new();
    if canon != Term::Nil {
        collect_summands(&canon, &mut parts);
    }
    parts
        .into_iter()
        .map(|s| match s {
            Term::Prefix(l, body) => Ok((l.clone(), (**body).clone())),
            other => Err(TermError::NotHeadNormal(other.to_string())),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn act(n: &str) -> Label {
        Label::action(n)
    }

    fn pre(n: &str, t: Term) -> Term {
        Term::prefix(act(n), t)
    }

    fn mix_theory() -> EquationalTheory {
        let mut th = EquationalTheory::new();
        th.add_label_op(
            "mix",
            OpAttrs { comm: true, ..OpAttrs::default() },
            Sort::Label,
        );
        th.add_multiset_identity("empty", "Data");
        for c in ["u", "v", "d"] {
            th.add_data_const(c, "Data");
        }
        th
    }

    #[test]
    fn choice_identity_and_idempotence() {
        let th = EquationalTheory::new();
        let t = Term::choice(pre("a", Term::Nil), Term::choice(Term::Nil, pre("a", Term::Nil)));
        assert_eq!(canon_process(&t, &th).unwrap(), pre("a", Term::Nil));
        let zero = Term::choice(Term::Nil, Term::Nil);
        assert_eq!(canon_process(&zero, &th).unwrap(), Term::Nil);
    }

    #[test]
    fn summands_sorted_by_rendering() {
        let th = EquationalTheory::new();
        let t = Term::choice(pre("b", pre("a", Term::Nil)), pre("a", pre("b", Term::Nil)));
        assert_eq!(canon_process(&t, &th).unwrap().to_string(), "a . b . 0 + b . a . 0");
    }

    #[test]
    fn rejects_user_operators() {
        let th = EquationalTheory::new();
        let t = Term::app("||", vec![Term::Nil, Term::Nil]);
        assert!(matches!(canon_process(&t, &th), Err(TermError::NonBccspTerm(_))));
    }

    #[test]
    fn comm_label_sorted() {
        let th = mix_theory();
        let l = Label::App("mix".into(), vec![act("b"), act("a")]);
        assert_eq!(canon_label(&l, &th).to_string(), "mix(a,b)");
    }

    #[test]
    fn multiset_identity_dropped() {
        let th = mix_theory();
        let l = Label::MSet(vec![
            Label::Const("v".into()),
            Label::Const("u".into()),
            Label::Const("empty".into()),
        ]);
        assert_eq!(canon_label(&l, &th).to_string(), "{u, v}");
        let triple = Label::Triple(
            Box::new(Label::MSet(vec![Label::Const("d".into()), Label::Const("u".into())])),
            Box::new(Label::MSet(vec![Label::Const("u".into()), Label::Const("d".into())])),
        );
        assert_eq!(canon_label(&triple, &th).to_string(), "< {d, u},-,{d, u} >");
        let lone = Label::Triple(Box::new(Label::Const("d".into())), Box::new(Label::Const("empty".into())));
        assert_eq!(canon_label(&lone, &th).to_string(), "< {d},-,{} >");
    }

    #[test]
    fn summand_listing() {
        let th = EquationalTheory::new();
        let t = Term::choice(Term::prefix(Label::predicate("|"), Term::Nil), pre("b", Term::Nil));
        let s = summands(&t, &th).unwrap();
        assert_eq!(s, vec![(act("b"), Term::Nil), (Label::predicate("|"), Term::Nil)]);
        assert!(summands(&Term::Nil, &th).unwrap().is_empty());
        let ab = Term::choice(pre("a", Term::Nil), pre("b", Term::Nil));
        assert_eq!(summands(&ab, &th).unwrap(), vec![(act("a"), Term::Nil), (act("b"), Term::Nil)]);
    }
}
