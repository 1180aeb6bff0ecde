use std::collections::{BTreeMap, HashMap};

use super::grammar::{Decl, Expr, RawPremise, RawRule};
use super::{ParseError, ParseErrorKind};
use crate::spec::{DataSort, LabelOp, NegPremise, Pos, ProcOp, Rule, SourceMap, Spec, Transition, VarSort};
use crate::terms::{canon_data, canon_label, EquationalTheory, Label, Sort, Term};

#[derive(Clone, Debug)]
enum Symbol {
    Action,
    Predicate,
    DataConst,
    LabelOp { args: Vec<Sort> },
    ProcOp(usize),
    ProcVar,
    LabelVar(Sort),
    Def,
}

const RESERVED: &[&str] = &["0", "+", "."];
const BUILTIN_SORTS: &[&str] = &["Proc", "Action", "Predicate", "Label"];

fn err<T>(kind: ParseErrorKind, pos: Pos) -> Result<T, ParseError> {
    Err(ParseError::new(kind, pos))
}

fn sort_err<T>(msg: String, pos: Pos) -> Result<T, ParseError> {
    err(ParseErrorKind::Sort(msg), pos)
}

pub(crate) struct Resolver {
    symbols: HashMap<String, Symbol>,
    theory: EquationalTheory,
    closed: bool,
}

impl Resolver {
    pub(crate) fn for_spec(spec: &Spec, closed: bool) -> Self {
        let mut symbols = HashMap::new();
        for a in &spec.actions {
            symbols.insert(a.clone(), Symbol::Action);
        }
        for p in &spec.predicates {
            symbols.insert(p.clone(), Symbol::Predicate);
        }
        for ds in &spec.data_sorts {
            if let Some(id) = &ds.attrs.identity {
                symbols.insert(id.clone(), Symbol::DataConst);
            }
        }
        for (c, _) in &spec.data_consts {
            symbols.insert(c.clone(), Symbol::DataConst);
        }
        for op in &spec.label_ops {
            symbols.insert(op.name.clone(), Symbol::LabelOp { args: op.args.clone() });
        }
        for op in &spec.proc_ops {
            symbols.insert(op.name.clone(), Symbol::ProcOp(op.arity));
        }
        for (v, s) in &spec.variables {
            let sym = match s {
                VarSort::Proc => Symbol::ProcVar,
                VarSort::Label(sort) => Symbol::LabelVar(sort.clone()),
            };
            symbols.insert(v.clone(), sym);
        }
        for d in spec.defs.keys() {
            symbols.insert(d.clone(), Symbol::Def);
        }
        Resolver { symbols, theory: spec.theory(), closed }
    }

    fn lookup(&self, name: &str, pos: Pos) -> Result<&Symbol, ParseError> {
        match self.symbols.get(name) {
            Some(s) => Ok(s),
            None => err(ParseErrorKind::UnknownSymbol(name.to_string()), pos),
        }
    }

    fn check_open(&self, name: &str, pos: Pos) -> Result<(), ParseError> {
        if self.closed {
            err(ParseErrorKind::UnboundVariable(name.to_string()), pos)
        } else {
            Ok(())
        }
    }

    pub(crate) fn term(&self, e: &Expr) -> Result<Term, ParseError> {
        match e {
            Expr::Name(n, _) if n == "0" => Ok(Term::Nil),
            Expr::Name(n, pos) => match self.lookup(n, *pos)? {
                Symbol::ProcVar => {
                    self.check_open(n, *pos)?;
                    Ok(Term::Var(n.clone()))
                }
                Symbol::Def => Ok(Term::Def(n.clone())),
                Symbol::ProcOp(0) => Ok(Term::App(n.clone(), vec![])),
                Symbol::ProcOp(k) => err(
                    ParseErrorKind::ArityMismatch { op: n.clone(), expected: *k, found: 0 },
                    *pos,
                ),
                _ => sort_err(format!("'{n}' is a label, expected a process term"), *pos),
            },
            Expr::Call(n, args, pos) => match self.lookup(n, *pos)? {
                Symbol::ProcOp(k) if *k == args.len() => {
                    let args = args.iter().map(|a| self.arg(a)).collect::<Result<_, _>>()?;
                    Ok(Term::App(n.clone(), args))
                }
                Symbol::ProcOp(k) => err(
                    ParseErrorKind::ArityMismatch { op: n.clone(), expected: *k, found: args.len() },
                    *pos,
                ),
                _ => sort_err(format!("'{n}' is not a process operator"), *pos),
            },
            Expr::Prefix(l, body, _) => {
                let label = self.transition_label(l)?;
                Ok(Term::prefix(label, self.term(body)?))
            }
            Expr::Plus(a, b, _) => Ok(Term::choice(self.term(a)?, self.term(b)?)),
            Expr::Infix(op, a, b, pos) => {
                let op_pos = *pos;
                match self.lookup(op, op_pos)? {
                    Symbol::ProcOp(2) => Ok(Term::App(op.clone(), vec![self.arg(a)?, self.arg(b)?])),
                    Symbol::ProcOp(k) => err(
                        ParseErrorKind::ArityMismatch { op: op.clone(), expected: *k, found: 2 },
                        op_pos,
                    ),
                    _ => sort_err(format!("'{op}' is not a binary process operator"), op_pos),
                }
            }
            Expr::Set(_, pos) | Expr::Triple(_, _, pos) => {
                sort_err("data term where a process term is expected".into(), *pos)
            }
        }
    }

    fn is_data_expr(&self, e: &Expr) -> bool {
        match e {
            Expr::Set(..) => true,
            Expr::Name(n, _) => matches!(
                self.symbols.get(n),
                Some(Symbol::DataConst) | Some(Symbol::LabelVar(Sort::Data(_)))
            ),
            _ => false,
        }
    }

    /// Operator argument: a process term, or a data term such as the tuple in `ask(u)`.
    fn arg(&self, e: &Expr) -> Result<Term, ParseError> {
        if self.is_data_expr(e) {
            let l = self.label(e)?;
            Ok(Term::Data(canon_data(&l, &self.theory)))
        } else {
            self.term(e)
        }
    }

    /// A label usable on a transition: action, predicate, label operator or store triple.
    pub(crate) fn transition_label(&self, e: &Expr) -> Result<Label, ParseError> {
        let l = self.label(e)?;
        match self.theory.sort_of(&l) {
            Some(Sort::Data(s)) => sort_err(format!("data of sort {s} used as a transition label"), e.pos()),
            _ => Ok(canon_label(&l, &self.theory)),
        }
    }

    fn data_sort(&self, l: &Label) -> Option<Sort> {
        match self.theory.sort_of(l) {
            Some(s @ Sort::Data(_)) => Some(s),
            _ => None,
        }
    }

    fn data(&self, e: &Expr) -> Result<Label, ParseError> {
        let l = self.label(e)?;
        if matches!(l, Label::MSet(ref elems) if elems.is_empty()) || self.data_sort(&l).is_some() {
            Ok(l)
        } else {
            sort_err(format!("'{l}' is not a data term"), e.pos())
        }
    }

    fn label(&self, e: &Expr) -> Result<Label, ParseError> {
        match e {
            Expr::Name(n, pos) => match self.lookup(n, *pos)? {
                Symbol::Action => Ok(Label::Action(n.clone())),
                Symbol::Predicate => Ok(Label::Predicate(n.clone())),
                Symbol::DataConst => Ok(Label::Const(n.clone())),
                Symbol::LabelVar(s) => {
                    self.check_open(n, *pos)?;
                    Ok(Label::Var(n.clone(), s.clone()))
                }
                Symbol::LabelOp { args } if args.is_empty() => Ok(Label::App(n.clone(), vec![])),
                Symbol::LabelOp { args } => err(
                    ParseErrorKind::ArityMismatch { op: n.clone(), expected: args.len(), found: 0 },
                    *pos,
                ),
                _ => sort_err(format!("'{n}' is a process symbol, expected a label"), *pos),
            },
            Expr::Call(n, args, pos) => match self.lookup(n, *pos)? {
                Symbol::LabelOp { args: sorts } if sorts.len() == args.len() => {
                    let mut out = Vec::new();
                    for (a, s) in args.iter().zip(sorts) {
                        let l = self.label(a)?;
                        if !self.theory.fits(s, &l) {
                            return sort_err(format!("'{l}' does not have sort {s}"), a.pos());
                        }
                        out.push(l);
                    }
                    Ok(Label::App(n.clone(), out))
                }
                Symbol::LabelOp { args: sorts } => err(
                    ParseErrorKind::ArityMismatch { op: n.clone(), expected: sorts.len(), found: args.len() },
                    *pos,
                ),
                _ => sort_err(format!("'{n}' is not a label operator"), *pos),
            },
            Expr::Set(elems, pos) => {
                let mut out = Vec::new();
                let mut sort: Option<Sort> = None;
                for el in elems {
                    let l = self.data(el)?;
                    if let Some(s) = self.data_sort(&l) {
                        match &sort {
                            Some(prev) if *prev != s => {
                                return sort_err(format!("multiset mixes sorts {prev} and {s}"), *pos)
                            }
                            _ => sort = Some(s),
                        }
                    }
                    out.push(l);
                }
                Ok(Label::MSet(out))
            }
            Expr::Triple(pre, post, _) => {
                let pre = self.data(pre)?;
                let post = self.data(post)?;
                Ok(Label::Triple(Box::new(pre), Box::new(post)))
            }
            Expr::Prefix(_, _, pos) | Expr::Plus(_, _, pos) | Expr::Infix(_, _, _, pos) => {
                sort_err("process term where a label is expected".into(), *pos)
            }
        }
    }

    fn rule(&self, raw: &RawRule) -> Result<Rule, ParseError> {
        let mut positives = Vec::new();
        let mut negatives = Vec::new();
        for p in &raw.premises {
            match p {
                RawPremise::Pos(s, l, t) => positives.push(Transition {
                    source: self.term(s)?,
                    label: self.transition_label(l)?,
                    target: self.term(t)?,
                }),
                RawPremise::Neg(s, l) => negatives.push(NegPremise {
                    source: self.term(s)?,
                    label: self.transition_label(l)?,
                }),
            }
        }
        let (s, l, t) = &raw.conclusion;
        let conclusion = Transition {
            source: self.term(s)?,
            label: self.transition_label(l)?,
            target: self.term(t)?,
        };
        Ok(Rule { positives, negatives, conclusion })
    }
}

fn resolve_sort(name: &str, data_sorts: &[DataSort], pos: Pos) -> Result<Sort, ParseError> {
    match name {
        "Action" => Ok(Sort::Action),
        "Predicate" => Ok(Sort::Predicate),
        "Label" => Ok(Sort::Label),
        _ if data_sorts.iter().any(|d| d.name == name) => Ok(Sort::Data(name.to_string())),
        _ => err(ParseErrorKind::UnknownSymbol(name.to_string()), pos),
    }
}

struct Names {
    seen: HashMap<String, Pos>,
}

impl Names {
    fn claim(&mut self, name: &str, pos: Pos) -> Result<(), ParseError> {
        if RESERVED.contains(&name) || super::grammar::is_keyword(name) || self.seen.contains_key(name) {
            return err(ParseErrorKind::DuplicateDeclaration(name.to_string()), pos);
        }
        self.seen.insert(name.to_string(), pos);
        Ok(())
    }
}

pub(crate) fn build_spec(name: String, decls: Vec<Decl>) -> Result<Spec, ParseError> {
    let mut spec = Spec { name, ..Spec::default() };
    let mut names = Names { seen: HashMap::new() };
    let mut sort_names: HashMap<String, Pos> = HashMap::new();

    // Sorts first so that declarations may use sorts declared further down.
    for d in &decls {
        if let Decl::DataSort(n, attrs, pos) = d {
            if BUILTIN_SORTS.contains(&n.as_str()) || sort_names.contains_key(n) {
                return err(ParseErrorKind::DuplicateDeclaration(n.clone()), *pos);
            }
            sort_names.insert(n.clone(), *pos);
            spec.data_sorts.push(DataSort { name: n.clone(), attrs: attrs.clone() });
        }
    }
    for ds in &spec.data_sorts {
        if let Some(id) = &ds.attrs.identity {
            names.claim(id, sort_names[&ds.name])?;
        }
    }

    let mut rules: Vec<&RawRule> = Vec::new();
    let mut defs: Vec<(&String, &Expr, Pos)> = Vec::new();
    let mut label_ids: Vec<(String, Pos)> = Vec::new();
    for d in &decls {
        match d {
            Decl::DataSort(..) => {}
            Decl::Actions(list) => {
                for (a, pos) in list {
                    names.claim(a, *pos)?;
                    spec.actions.push(a.clone());
                }
            }
            Decl::Predicates(list) => {
                for (p, pos) in list {
                    names.claim(p, *pos)?;
                    spec.predicates.push(p.clone());
                }
            }
            Decl::DataConst(list, sort, pos) => {
                if !sort_names.contains_key(sort) {
                    return err(ParseErrorKind::UnknownSymbol(sort.clone()), *pos);
                }
                for (c, p) in list {
                    names.claim(c, *p)?;
                    spec.data_consts.push((c.clone(), sort.clone()));
                }
            }
            Decl::LabelOp { name, args, result, attrs, pos } => {
                names.claim(name, *pos)?;
                let args = args
                    .iter()
                    .map(|(s, p)| resolve_sort(s, &spec.data_sorts, *p))
                    .collect::<Result<Vec<_>, _>>()?;
                let result = resolve_sort(&result.0, &spec.data_sorts, result.1)?;
                if result.is_data() {
                    return sort_err(format!("label operator '{name}' must produce a transition label"), *pos);
                }
                if let Some(id) = &attrs.identity {
                    label_ids.push((id.clone(), *pos));
                }
                spec.label_ops.push(LabelOp { name: name.clone(), args, result, attrs: attrs.clone() });
            }
            Decl::Op { name, arity, attrs, pos } => {
                names.claim(name, *pos)?;
                if attrs.assoc || attrs.identity.is_some() {
                    return sort_err(format!("process operator '{name}' only admits [comm]"), *pos);
                }
                spec.proc_ops.push(ProcOp { name: name.clone(), arity: *arity, comm: attrs.comm });
            }
            Decl::Var(list, sort, pos) => {
                let vs = if sort == "Proc" {
                    VarSort::Proc
                } else {
                    VarSort::Label(resolve_sort(sort, &spec.data_sorts, *pos)?)
                };
                for (v, p) in list {
                    names.claim(v, *p)?;
                    spec.variables.insert(v.clone(), vs.clone());
                }
            }
            Decl::Rule(r) => rules.push(r),
            Decl::Def(n, body, pos) => {
                names.claim(n, *pos)?;
                defs.push((n, body, *pos));
            }
        }
    }
    for (id, pos) in &label_ids {
        if !names.seen.contains_key(id) {
            return err(ParseErrorKind::UnknownSymbol(id.clone()), *pos);
        }
    }
    for (n, _, _) in &defs {
        spec.defs.insert((*n).clone(), Term::Nil);
    }

    let resolver = Resolver::for_spec(&spec, false);
    let mut source_map = SourceMap { rules: Vec::new(), defs: BTreeMap::new() };
    for r in rules {
        spec.rules.push(resolver.rule(r)?);
        source_map.rules.push(r.pos);
    }
    for (n, body, pos) in defs {
        spec.defs.insert(n.clone(), resolver.term(body)?);
        source_map.defs.insert(n.clone(), pos);
    }
    spec.source_map = source_map;
    Ok(spec)
}
