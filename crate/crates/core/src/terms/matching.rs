//! Matching of open patterns against ground subjects modulo the label algebra.
//!
//! Multisets are matched modulo associativity, commutativity and unit: constants in the
//! pattern must occur in the subject, and the remaining subject elements are distributed
//! over the pattern's variables in every possible way (a variable may receive the empty
//! multiset). Sums on process terms are matched modulo the core equations, so a variable
//! summand may stand for `0` and summands may be shared between pattern parts.

use std::collections::BTreeSet;

use super::subst::Substitution;
use super::syntax::{Label, Sort, Term};
use super::theory::{canon_data, canon_label, canon_term, EquationalTheory};

/// All substitutions `s` with `canon(pattern s) = canon(subject)`.
pub fn match_label(pattern: &Label, subject: &Label, th: &EquationalTheory) -> Vec<Substitution> {
    extend_label_match(pattern, subject, th, &Substitution::new())
}

/// Like [`match_label`] but extending an existing substitution.
pub fn extend_label_match(
    pattern: &Label,
    subject: &Label,
    th: &EquationalTheory,
    base: &Substitution,
) -> Vec<Substitution> {
    let mut out = Vec::new();
    let p = canon_label(pattern, th);
    let s = canon_label(subject, th);
    match_lab(&p, &s, th, base.clone(), &mut out);
    dedup(out)
}

pub fn match_term(pattern: &Term, subject: &Term, th: &EquationalTheory) -> Vec<Substitution> {
    extend_term_match(pattern, subject, th, &Substitution::new())
}

pub fn extend_term_match(
    pattern: &Term,
    subject: &Term,
    th: &EquationalTheory,
    base: &Substitution,
) -> Vec<Substitution> {
    let mut out = Vec::new();
    let s = canon_term(subject, th);
    match_proc(pattern, &s, th, base.clone(), &mut out);
    dedup(out)
}

fn dedup(v: Vec<Substitution>) -> Vec<Substitution> {
    let mut seen = BTreeSet::new();
    v.into_iter().filter(|s| seen.insert(s.clone())).collect()
}

fn same_label(a: &Label, b: &Label, th: &EquationalTheory) -> bool {
    a == b || canon_label(a, th) == canon_label(b, th)
}

fn match_lab(p: &Label, s: &Label, th: &EquationalTheory, sub: Substitution, out: &mut Vec<Substitution>) {
    match (p, s) {
        (Label::Var(name, sort), _) => match sub.labels.get(name) {
            Some(bound) => {
                if same_label(bound, s, th) {
                    out.push(sub);
                }
            }
            None => {
                if th.fits(sort, s) {
                    let image = if sort.is_data() { canon_data(s, th) } else { s.clone() };
                    out.push(sub.with_label(name, image));
                }
            }
        },
        (Label::Action(a), Label::Action(b))
        | (Label::Predicate(a), Label::Predicate(b))
        | (Label::Const(a), Label::Const(b)) => {
            if a == b {
                out.push(sub);
            }
        }
        (Label::App(f, ps), Label::App(g, ss)) if f == g && ps.len() == ss.len() => {
            let attrs = th.label_op(f).cloned().unwrap_or_default();
            if attrs.comm {
                for perm in permutations(ss.len()) {
                    let reordered: Vec<&Label> = perm.iter().map(|&i| &ss[i]).collect();
                    match_seq(ps, &reordered, th, sub.clone(), out);
                }
            } else {
                let ordered: Vec<&Label> = ss.iter().collect();
                match_seq(ps, &ordered, th, sub, out);
            }
        }
        (Label::MSet(_), _) | (_, Label::MSet(_)) => {
            let (Label::MSet(ps), Label::MSet(ss)) = (canon_data(p, th), canon_data(s, th)) else {
                return;
            };
            match_multiset(&ps, &ss, th, sub, out);
        }
        (Label::Triple(p1, p2), Label::Triple(s1, s2)) => {
            let (p1, s1) = (canon_data(p1, th), canon_data(s1, th));
            let (p2, s2) = (canon_data(p2, th), canon_data(s2, th));
            let mut firsts = Vec::new();
            match_lab(&p1, &s1, th, sub, &mut firsts);
            for f in firsts {
                match_lab(&p2, &s2, th, f, out);
            }
        }
        _ => {}
    }
}

fn match_seq(ps: &[Label], ss: &[&Label], th: &EquationalTheory, sub: Substitution, out: &mut Vec<Substitution>) {
    match ps.split_first() {
        None => out.push(sub),
        Some((p, rest)) => {
            let mut partial = Vec::new();
            match_lab(p, ss[0], th, sub, &mut partial);
            for s in partial {
                match_seq(rest, &ss[1..], th, s, out);
            }
        }
    }
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn elements(image: &Label) -> Vec<Label> {
    match image {
        Label::MSet(es) => es.clone(),
        other => vec![other.clone()],
    }
}

fn take(remaining: &mut Vec<Label>, e: &Label) -> bool {
    match remaining.iter().position(|r| r == e) {
        Some(i) => {
            remaining.remove(i);
            true
        }
        None => false,
    }
}

fn match_multiset(
    ps: &[Label],
    ss: &[Label],
    th: &EquationalTheory,
    sub: Substitution,
    out: &mut Vec<Substitution>,
) {
    let (vars, fixed): (Vec<&Label>, Vec<&Label>) = ps.iter().partition(|p| matches!(p, Label::Var(..)));
    match_fixed(&fixed, ss.to_vec(), &vars, th, sub, out);
}

/// Non-variable pattern elements each consume one subject element.
fn match_fixed(
    fixed: &[&Label],
    remaining: Vec<Label>,
    vars: &[&Label],
    th: &EquationalTheory,
    sub: Substitution,
    out: &mut Vec<Substitution>,
) {
    let Some((p, rest)) = fixed.split_first() else {
        distribute_vars(vars, remaining, th, sub, out);
        return;
    };
    let mut tried = BTreeSet::new();
    for (i, e) in remaining.iter().enumerate() {
        if !tried.insert(e.clone()) {
            continue;
        }
        let mut partial = Vec::new();
        match_lab(p, e, th, sub.clone(), &mut partial);
        for s in partial {
            let mut left = remaining.clone();
            left.remove(i);
            match_fixed(rest, left, vars, th, s, out);
        }
    }
}

fn distribute_vars(
    vars: &[&Label],
    mut remaining: Vec<Label>,
    th: &EquationalTheory,
    mut sub: Substitution,
    out: &mut Vec<Substitution>,
) {
    // Bound variables consume their image; the rest are grouped with multiplicities.
    let mut free: Vec<(String, Sort, usize)> = Vec::new();
    for v in vars {
        let Label::Var(name, sort) = v else { unreachable!() };
        if let Some(bound) = sub.labels.get(name) {
            for e in elements(bound) {
                if !take(&mut remaining, &e) {
                    return;
                }
            }
        } else if let Some(slot) = free.iter_mut().find(|(n, _, _)| n == name) {
            slot.2 += 1;
        } else {
            free.push((name.clone(), sort.clone(), 1));
        }
    }
    if free.is_empty() {
        if remaining.is_empty() {
            out.push(sub);
        }
        return;
    }
    let mut counts: Vec<(Label, usize)> = Vec::new();
    remaining.sort_by_cached_key(|l| l.to_string());
    for e in remaining {
        match counts.last_mut() {
            Some((last, n)) if *last == e => *n += 1,
            _ => counts.push((e, 1)),
        }
    }
    assign_free(&free, counts, th, &mut sub, out);
}

fn assign_free(
    free: &[(String, Sort, usize)],
    counts: Vec<(Label, usize)>,
    th: &EquationalTheory,
    sub: &mut Substitution,
    out: &mut Vec<Substitution>,
) {
    let Some(((name, sort, mult), rest)) = free.split_first() else {
        if counts.iter().all(|(_, n)| *n == 0) {
            out.push(sub.clone());
        }
        return;
    };
    let mut choice = vec![0usize; counts.len()];
    loop {
        let last = rest.is_empty();
        let valid = !last || counts.iter().zip(&choice).all(|((_, n), c)| c * mult == *n);
        if valid {
            let mut image = Vec::new();
            for ((e, _), c) in counts.iter().zip(&choice) {
                image.extend(std::iter::repeat_n(e.clone(), *c));
            }
            let image = Label::MSet(image);
            if th.fits(sort, &image) {
                let left: Vec<(Label, usize)> = counts
                    .iter()
                    .zip(&choice)
                    .map(|((e, n), c)| (e.clone(), n - c * mult))
                    .collect();
                let saved = sub.labels.insert(name.clone(), image);
                assign_free(rest, left, th, sub, out);
                match saved {
                    Some(old) => sub.labels.insert(name.clone(), old),
                    None => sub.labels.remove(name),
                };
            }
        }
        // odometer over per-element counts
        let mut i = 0;
        loop {
            if i == counts.len() {
                return;
            }
            if (choice[i] + 1) * mult <= counts[i].1 {
                choice[i] += 1;
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn flatten_sum<'a>(t: &'a Term, out: &mut Vec<&'a Term>) {
    match t {
        Term::Choice(a, b) => {
            flatten_sum(a, out);
            flatten_sum(b, out);
        }
        Term::Nil => {}
        other => out.push(other),
    }
}

fn match_proc(p: &Term, s: &Term, th: &EquationalTheory, sub: Substitution, out: &mut Vec<Substitution>) {
    match (p, s) {
        (Term::Var(v), _) => match sub.terms.get(v) {
            Some(bound) => {
                if canon_term(bound, th) == *s {
                    out.push(sub);
                }
            }
            None => out.push(sub.with_term(v, s.clone())),
        },
        (Term::Nil, Term::Nil) => out.push(sub),
        (Term::Def(a), Term::Def(b)) if a == b => out.push(sub),
        (Term::Data(pl), Term::Data(sl)) => {
            let (pl, sl) = (canon_data(pl, th), canon_data(sl, th));
            match_lab(&pl, &sl, th, sub, out);
        }
        (Term::Prefix(pl, pb), Term::Prefix(sl, sb)) => {
            let mut partial = Vec::new();
            match_lab(&canon_label(pl, th), sl, th, sub, &mut partial);
            for s2 in partial {
                match_proc(pb, sb, th, s2, out);
            }
        }
        (Term::App(f, ps), Term::App(g, ss)) if f == g && ps.len() == ss.len() => {
            match_proc_seq(ps, ss, th, sub, out);
        }
        (Term::Choice(..), _) => {
            let mut pats = Vec::new();
            flatten_sum(p, &mut pats);
            let mut subj = Vec::new();
            flatten_sum(s, &mut subj);
            let subj: Vec<Term> = subj.into_iter().cloned().collect();
            match_sum(&pats, &subj, vec![false; subj.len()], th, sub, out);
        }
        _ => {}
    }
}

/// Sum patterns modulo associativity, commutativity, idempotence and unit `0`: each
/// non-variable summand matches one subject summand, and the free variables share out the
/// subject summands in every way that covers them all (a variable may stand for `0`).
fn match_sum(
    pats: &[&Term],
    subj: &[Term],
    covered: Vec<bool>,
    th: &EquationalTheory,
    sub: Substitution,
    out: &mut Vec<Substitution>,
) {
    let Some(i) = pats.iter().position(|p| !matches!(p, Term::Var(v) if !sub.terms.contains_key(v))) else {
        let mut free: Vec<&str> = pats.iter().filter_map(|p| if let Term::Var(v) = p { Some(v.as_str()) } else { None }).collect();
        free.sort_unstable();
        free.dedup();
        share_out(&free, subj, covered, th, sub, out);
        return;
    };
    let rest: Vec<&Term> = pats.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, p)| *p).collect();
    if let Term::Var(v) = pats[i] {
        // bound variable: its summands must all occur in the subject
        let mut parts = Vec::new();
        let bound = canon_term(&sub.terms[v], th);
        flatten_sum(&bound, &mut parts);
        let mut covered = covered;
        for part in parts {
            match subj.iter().position(|s| s == part) {
                Some(j) => covered[j] = true,
                None => return,
            }
        }
        match_sum(&rest, subj, covered, th, sub, out);
        return;
    }
    for (j, s) in subj.iter().enumerate() {
        let mut partial = Vec::new();
        match_proc(pats[i], s, th, sub.clone(), &mut partial);
        for next in partial {
            let mut covered = covered.clone();
            covered[j] = true;
            match_sum(&rest, subj, covered, th, next, out);
        }
    }
}

fn share_out(
    free: &[&str],
    subj: &[Term],
    covered: Vec<bool>,
    th: &EquationalTheory,
    sub: Substitution,
    out: &mut Vec<Substitution>,
) {
    let Some((v, rest)) = free.split_first() else {
        if covered.iter().all(|c| *c) {
            out.push(sub);
        }
        return;
    };
    let n = subj.len();
    for mask in 0u64..(1u64 << n) {
        // the last variable has to take whatever is still uncovered
        if rest.is_empty() && (0..n).any(|j| !covered[j] && mask & (1 << j) == 0) {
            continue;
        }
        let group: Vec<Term> = (0..n).filter(|j| mask & (1 << j) != 0).map(|j| subj[j].clone()).collect();
        let mut covered = covered.clone();
        for (j, c) in covered.iter_mut().enumerate() {
            *c |= mask & (1 << j) != 0;
        }
        let image = canon_term(&Term::sum(group), th);
        share_out(rest, subj, covered, th, sub.clone().with_term(v, image), out);
    }
}

fn match_proc_seq(ps: &[Term], ss: &[Term], th: &EquationalTheory, sub: Substitution, out: &mut Vec<Substitution>) {
    match ps.split_first() {
        None => out.push(sub),
        Some((p, rest)) => {
            let mut partial = Vec::new();
            match_proc(p, &ss[0], th, sub, &mut partial);
            for s in partial {
                match_proc_seq(rest, &ss[1..], th, s, out);
            }
        }
    }
}
