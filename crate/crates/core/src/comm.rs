//! Detection of commutative binary operators through mirrored rule pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::spec::{Rule, Spec};
use crate::terms::{canon_label, canon_term, op_display_name, substitute, substitute_label, EquationalTheory, Label, Sort, Substitution, Term};

/// Canonical form modulo the core equations with the arguments of every operator in `comm`
/// put in rendering order, at every depth.
pub fn cc_canon(t: &Term, comm: &BTreeSet<String>, th: &EquationalTheory) -> Term {
    match t {
        Term::App(op, args) => {
            let mut args: Vec<Term> = args.iter().map(|a| cc_canon(a, comm, th)).collect();
            if args.len() == 2 && comm.contains(op) {
                args.sort_by_cached_key(|a| a.to_string());
            }
            Term::App(op.clone(), args)
        }
        Term::Prefix(l, body) => Term::prefix(canon_label(l, th), cc_canon(body, comm, th)),
        Term::Choice(a, b) => canon_term(&Term::choice(cc_canon(a, comm, th), cc_canon(b, comm, th)), th),
        other => canon_term(other, th),
    }
}

/// Equality up to swapping arguments of operators in `comm`, in any context.
pub fn cc_equal(t1: &Term, t2: &Term, comm: &BTreeSet<String>, th: &EquationalTheory) -> bool {
    cc_canon(t1, comm, th) == cc_canon(t2, comm, th)
}

/// `mapping` renames the variables of `rule_b` so that it reproduces `rule_a` with the
/// source arguments swapped. Rule numbers are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MirrorWitness {
    pub rule_a: usize,
    pub rule_b: usize,
    pub mapping: Substitution,
}

/// Variable order used when printing a mapping: by base name, primed variants first.
fn var_order(name: &str) -> (String, std::cmp::Reverse<usize>) {
    let base = name.trim_end_matches('\'');
    (base.to_string(), std::cmp::Reverse(name.len() - base.len()))
}

impl MirrorWitness {
    /// Pairs `(variable of rule_b, its image)` in display order.
    pub fn pairs(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self
            .mapping
            .labels
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .chain(self.mapping.terms.iter().map(|(k, v)| (k.clone(), v.to_string())))
            .collect();
        out.sort_by_cached_key(|(k, _)| var_order(k));
        out
    }

    pub fn mapping_line(&self) -> String {
        let parts: Vec<String> = self.pairs().into_iter().map(|(k, v)| format!("{k} <- {v}")).collect();
        parts.join("  ")
    }
}

impl Serialize for MirrorWitness {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        struct Mapping<'a>(&'a [(String, String)]);
        impl Serialize for Mapping<'_> {
            fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
                let mut m = ser.serialize_map(Some(self.0.len()))?;
                for (k, v) in self.0 {
                    m.serialize_entry(k, v)?;
                }
                m.end()
            }
        }
        let pairs = self.pairs();
        let mut st = ser.serialize_struct("MirrorWitness", 3)?;
        st.serialize_field("rule_a", &self.rule_a)?;
        st.serialize_field("rule_b", &self.rule_b)?;
        st.serialize_field("mapping", &Mapping(&pairs))?;
        st.end()
    }
}

/// The two distinct argument variables of a rule in the shape the format requires: premises
/// test only those arguments and have variable targets.
fn mirror_shape(rule: &Rule) -> Option<(&str, &str)> {
    let [Term::Var(x0), Term::Var(x1)] = rule.source_args() else {
        return None;
    };
    if x0 == x1 {
        return None;
    }
    let is_arg = |t: &Term| matches!(t, Term::Var(v) if v == x0 || v == x1);
    let ok = rule.positives.iter().all(|p| is_arg(&p.source) && matches!(p.target, Term::Var(_)))
        && rule.negatives.iter().all(|n| is_arg(&n.source));
    ok.then_some((x0.as_str(), x1.as_str()))
}

fn dedup_vars(vars: Vec<(String, Sort)>) -> Vec<(String, Sort)> {
    let mut out: Vec<(String, Sort)> = Vec::new();
    for v in vars {
        if !out.iter().any(|(n, _)| *n == v.0) {
            out.push(v);
        }
    }
    out
}

/// Every sort-preserving injective renaming of `from` into `to`.
fn label_renamings(from: &[(String, Sort)], to: &[(String, Sort)]) -> Vec<Substitution> {
    fn go(
        from: &[(String, Sort)],
        to: &[(String, Sort)],
        used: &mut Vec<bool>,
        acc: Substitution,
        out: &mut Vec<Substitution>,
    ) {
        let Some(((name, sort), rest)) = from.split_first() else {
            out.push(acc);
            return;
        };
        for (j, (img, img_sort)) in to.iter().enumerate() {
            if !used[j] && img_sort == sort {
                used[j] = true;
                go(rest, to, used, acc.clone().with_label(name, Label::var(img, sort.clone())), out);
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(from, to, &mut vec![false; to.len()], Substitution::new(), &mut out);
    out
}

struct MirrorSearch<'a> {
    a: &'a Rule,
    b: &'a Rule,
    comm: &'a BTreeSet<String>,
    th: &'a EquationalTheory,
    found: Vec<Substitution>,
}

impl MirrorSearch<'_> {
    fn same_label(&self, renamed_b: &Label, a: &Label) -> bool {
        canon_label(renamed_b, self.th) == canon_label(a, self.th)
    }

    fn bind(sub: &Substitution, var: &str, image: &str) -> Option<Substitution> {
        match sub.terms.get(var) {
            Some(Term::Var(v)) if v == image => Some(sub.clone()),
            Some(_) => None,
            None if sub.terms.values().any(|t| matches!(t, Term::Var(v) if v == image)) => None,
            None => Some(sub.clone().with_term(var, Term::var(image))),
        }
    }

    /// Map premise `i` onwards of rule b (positives, then negatives) into rule a's premises.
    fn premises(&mut self, i: usize, sub: Substitution) {
        let (a, b) = (self.a, self.b);
        if i < b.positives.len() {
            let hb = &b.positives[i];
            let Ok(label) = substitute_label(&hb.label, &sub) else { return };
            let Ok(source) = substitute(&hb.source, &sub) else { return };
            let Term::Var(target) = &hb.target else { return };
            for ha in &a.positives {
                let Term::Var(image) = &ha.target else { continue };
                if ha.source == source && self.same_label(&label, &ha.label) {
                    if let Some(next) = Self::bind(&sub, target, image) {
                        self.premises(i + 1, next);
                    }
                }
            }
            return;
        }
        let j = i - b.positives.len();
        if j < b.negatives.len() {
            let hb = &b.negatives[j];
            let (Ok(label), Ok(source)) = (substitute_label(&hb.label, &sub), substitute(&hb.source, &sub)) else {
                return;
            };
            if a.negatives.iter().any(|ha| ha.source == source && self.same_label(&label, &ha.label)) {
                self.premises(i + 1, sub);
            }
            return;
        }
        let Ok(target) = substitute(&b.conclusion.target, &sub) else { return };
        if cc_equal(&target, &a.conclusion.target, self.comm, self.th) && !self.found.contains(&sub) {
            self.found.push(sub);
        }
    }
}

/// All renamings that make `rule_b` a commutative mirror of `rule_a` modulo `comm`.
pub fn find_mirror(
    rule_a: &Rule,
    rule_b: &Rule,
    comm: &BTreeSet<String>,
    th: &EquationalTheory,
) -> Vec<Substitution> {
    let (Some((a0, a1)), Some((b0, b1))) = (mirror_shape(rule_a), mirror_shape(rule_b)) else {
        return Vec::new();
    };
    if rule_a.defined_op() != rule_b.defined_op() {
        return Vec::new();
    }
    let mut search = MirrorSearch { a: rule_a, b: rule_b, comm, th, found: Vec::new() };
    let labels_b = dedup_vars(rule_b.label_vars());
    let labels_a = dedup_vars(rule_a.label_vars());
    for renaming in label_renamings(&labels_b, &labels_a) {
        let Ok(label) = substitute_label(&rule_b.conclusion.label, &renaming) else { continue };
        if !search.same_label(&label, &rule_a.conclusion.label) {
            continue;
        }
        let sub = renaming.with_term(b0, Term::var(a1)).with_term(b1, Term::var(a0));
        search.premises(0, sub);
    }
    search.found.into_iter().map(|m| complete_bijection(m, rule_a, rule_b)).collect()
}

/// Extend a renaming of rule b's variables to a bijection on the variables of both rules by
/// pairing the leftovers in display order, kind by kind and sort by sort.
fn complete_bijection(mut m: Substitution, a: &Rule, b: &Rule) -> Substitution {
    let mut procs: Vec<String> = a.proc_vars();
    procs.extend(b.proc_vars());
    procs.sort_by_cached_key(|v| var_order(v));
    procs.dedup();
    let image: BTreeSet<String> = m.terms.values().map(|t| t.to_string()).collect();
    let free_dom: Vec<&String> = procs.iter().filter(|v| !m.terms.contains_key(*v)).collect();
    let free_img: Vec<&String> = procs.iter().filter(|v| !image.contains(*v)).collect();
    for (d, i) in free_dom.into_iter().zip(free_img) {
        m.terms.insert(d.clone(), Term::var(i));
    }
    let mut labels = dedup_vars(a.label_vars().into_iter().chain(b.label_vars()).collect());
    labels.sort_by_cached_key(|(v, _)| var_order(v));
    let image: BTreeSet<String> = m.labels.values().map(|l| l.to_string()).collect();
    let sorts: BTreeSet<String> = labels.iter().map(|(_, s)| s.to_string()).collect();
    for sort in sorts {
        let of_sort = labels.iter().filter(|(_, s)| s.to_string() == sort);
        let free_dom: Vec<_> = of_sort.clone().filter(|(v, _)| !m.labels.contains_key(v)).collect();
        let free_img: Vec<_> = of_sort.filter(|(v, _)| !image.contains(v)).collect();
        for ((d, s), (i, _)) in free_dom.into_iter().zip(free_img) {
            m.labels.insert(d.clone(), Label::var(i, s.clone()));
        }
    }
    m
}

/// Outcome of the format check. Rule numbers are 1-based positions in the spec.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommReport {
    /// Proven operators with the mirror found for each of their rules.
    pub commutative: BTreeMap<String, Vec<MirrorWitness>>,
    /// Operators left out, with the rules that have no mirror.
    pub failed: BTreeMap<String, Vec<usize>>,
    /// Candidate set at the start of each round of the fixpoint iteration.
    pub rounds: Vec<BTreeSet<String>>,
    rules: BTreeMap<usize, Rule>,
}

impl CommReport {
    pub fn rule(&self, number: usize) -> Option<&Rule> {
        self.rules.get(&number)
    }

    pub fn is_commutative(&self, op: &str) -> bool {
        self.commutative.contains_key(op)
    }
}

impl Serialize for CommReport {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let failed: BTreeMap<&String, Vec<String>> = self
            .failed
            .iter()
            .map(|(op, rules)| (op, rules.iter().filter_map(|n| self.rules.get(n)).map(|r| r.to_string()).collect()))
            .collect();
        let mut st = ser.serialize_struct("CommReport", 2)?;
        st.serialize_field("commutative", &self.commutative)?;
        st.serialize_field("failed", &failed)?;
        st.end()
    }
}

/// Mirrors for each rule of `op` under the candidate set `comm`; `Err` lists the rules without one.
fn mirrors_for(
    spec: &Spec,
    op: &str,
    comm: &BTreeSet<String>,
    th: &EquationalTheory,
) -> Result<Vec<MirrorWitness>, Vec<usize>> {
    let rules: Vec<(usize, &Rule)> = spec.rules_for(op).collect();
    let mut found = Vec::new();
    let mut missing = Vec::new();
    for &(ia, a) in &rules {
        let witness = rules.iter().find_map(|&(ib, b)| {
            find_mirror(a, b, comm, th)
                .into_iter()
                .next()
                .map(|mapping| MirrorWitness { rule_a: ia + 1, rule_b: ib + 1, mapping })
        });
        match witness {
            Some(w) => found.push(w),
            None => missing.push(ia + 1),
        }
    }
    if missing.is_empty() {
        Ok(found)
    } else {
        Err(missing)
    }
}

/// Greatest set of binary operators whose rules all have mirrors modulo that same set.
pub fn check_comm(spec: &Spec) -> CommReport {
    let th = spec.theory();
    let mut comm: BTreeSet<String> = spec.binary_ops().map(|op| op.name.clone()).collect();
    let mut rounds = Vec::new();
    loop {
        rounds.push(comm.clone());
        let survivors: BTreeSet<String> =
            comm.iter().filter(|op| mirrors_for(spec, op, &comm, &th).is_ok()).cloned().collect();
        if survivors == comm {
            break;
        }
        comm = survivors;
    }
    let mut report = CommReport { rounds, ..CommReport::default() };
    for op in spec.binary_ops() {
        match mirrors_for(spec, &op.name, &comm, &th) {
            Ok(ws) if comm.contains(&op.name) => {
                report.commutative.insert(op.name.clone(), ws);
            }
            Ok(_) => {
                report.failed.insert(op.name.clone(), Vec::new());
            }
            Err(missing) => {
                report.failed.insert(op.name.clone(), missing);
            }
        }
    }
    for (i, r) in spec.rules.iter().enumerate() {
        report.rules.insert(i + 1, r.clone());
    }
    report
}

/// The spec with every proven operator marked `[comm]`.
pub fn derived_spec(spec: &Spec, report: &CommReport) -> Spec {
    let mut out = spec.clone();
    out.name = format!("{}_FORMATS", spec.name);
    for op in &mut out.proc_ops {
        if report.is_commutative(&op.name) {
            op.comm = true;
        }
    }
    out
}

/// Rules rendered side by side: premises over `===` over conclusion.
fn columns(rules: &[&Rule], middle: &str) -> String {
    let cells: Vec<(String, String)> =
        rules.iter().map(|r| (r.premise_strings().join(", "), r.conclusion.to_string())).collect();
    let widths: Vec<usize> = cells.iter().map(|(p, c)| p.len().max(c.len()).max(3 + middle.len()) + 4).collect();
    let mut lines = [String::new(), String::new(), String::new()];
    let last = cells.len().saturating_sub(1);
    for (k, (p, c)) in cells.iter().enumerate() {
        let sep = if k == 0 && !middle.is_empty() {
            format!("{:<w$}", "===", w = widths[k] - middle.len() - 4) + middle + "    "
        } else {
            "===".to_string()
        };
        for (line, cell) in lines.iter_mut().zip([p, &sep, c]) {
            if k == last {
                line.push_str(cell);
            } else {
                line.push_str(&format!("{cell:<w$}", w = widths[k]));
            }
        }
    }
    lines.iter().map(|l| format!("{}\n", l.trim_end())).collect()
}

impl fmt::Display for CommReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (op, witnesses) in &self.commutative {
            writeln!(f, "{} is commutative:", op_display_name(op))?;
            let mut shown: BTreeSet<(usize, usize)> = BTreeSet::new();
            for w in witnesses {
                if shown.contains(&(w.rule_b, w.rule_a)) || !shown.insert((w.rule_a, w.rule_b)) {
                    continue;
                }
                let (Some(a), Some(b)) = (self.rule(w.rule_a), self.rule(w.rule_b)) else { continue };
                writeln!(f)?;
                f.write_str(&columns(&[a, b], "mirrors"))?;
                writeln!(f)?;
                writeln!(f, "with:  {}", w.mapping_line())?;
            }
            writeln!(f)?;
        }
        for (op, missing) in &self.failed {
            writeln!(f, "Could not prove commutativity for:  {}", op_display_name(op))?;
            let rules: Vec<&Rule> = missing.iter().filter_map(|n| self.rule(*n)).collect();
            if !rules.is_empty() {
                writeln!(f, "Could not find commutative mirrors within:")?;
                f.write_str(&columns(&rules, ""))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_spec, parse_term};

    fn spec(src: &str) -> Spec {
        parse_spec(src).unwrap()
    }

    fn set(ops: &[&str]) -> BTreeSet<String> {
        ops.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn swapping_modulo_commutative_operators() {
        let s = spec(include_str!("../corpus/linda.sos"));
        let th = s.theory();
        let t = |src: &str| parse_term(src, &s, false).unwrap();
        assert!(cc_equal(&t("x' + y'"), &t("y' + x'"), &set(&[]), &th));
        assert!(!cc_equal(&t("x' ; y'"), &t("y' ; x'"), &set(&[]), &th));
        assert!(cc_equal(&t("(x || y) ; 0"), &t("(y || x) ; 0"), &set(&["||"]), &th));
        let g = spec(include_str!("../corpus/g.sos"));
        let l = |src: &str| parse_term(src, &g, false).unwrap();
        assert!(cc_equal(&l("mix(k,l) . x"), &l("mix(l,k) . x"), &set(&[]), &g.theory()));
    }

    #[test]
    fn parallel_composition_mirrors() {
        let s = spec(include_str!("../corpus/bccsp_par.sos"));
        let report = check_comm(&s);
        let ws = &report.commutative["||"];
        assert_eq!(ws.len(), 3);
        assert_eq!((ws[0].rule_a, ws[0].rule_b), (1, 2));
        assert_eq!(ws[0].mapping_line(), "alpha <- alpha  x' <- y'  x <- y  y' <- x'  y <- x");
        assert_eq!((ws[2].rule_a, ws[2].rule_b), (3, 3));
        assert_eq!(ws[2].mapping_line(), "x' <- y'  x <- y  y' <- x'  y <- x");
        assert!(report.failed.is_empty());
        let text = report.to_string();
        assert!(text.starts_with("_||_ is commutative:\n\nx -(alpha)-> x'"));
        assert!(text.contains("\nwith:  alpha <- alpha  x' <- y'  x <- y  y' <- x'  y <- x\n"));
        assert_eq!(text.matches("mirrors").count(), 2);
        let derived = derived_spec(&s, &report);
        assert!(derived.proc_op("||").unwrap().comm);
        assert_eq!(parse_spec(&derived.to_string()).unwrap(), derived);
    }

    #[test]
    fn label_swap_for_g() {
        let report = check_comm(&spec(include_str!("../corpus/g.sos")));
        let ws = &report.commutative["g"];
        assert_eq!(ws[0].mapping_line(), "k <- l  l <- k  x' <- y'  x <- y  y' <- x'  y <- x");
        assert_eq!(ws[1].mapping_line(), "l <- l  x' <- y'  x <- y  y' <- x'  y <- x");
    }

    #[test]
    fn sequential_composition_is_not_proven() {
        let report = check_comm(&spec(include_str!("../corpus/linda.sos")));
        assert!(report.is_commutative("||"));
        assert_eq!(report.failed[";"], vec![7, 8, 9]);
        let text = report.to_string();
        assert!(text.contains("Could not prove commutativity for:  _;_\nCould not find commutative mirrors within:\n"));
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["failed"][";"].as_array().unwrap().len(), 3);
        assert_eq!(json["commutative"]["||"][0]["mapping"]["x"], "y");
    }

    #[test]
    fn fixpoint_drops_dependent_operators() {
        // f mirrors itself only if h is commutative, and h is not.
        let src = "spec D\nactions a ;\nop f : 2 ;\nop h : 2 ;\nvar x y x' y' : Proc ;\n\
                   rule x -(a)-> x', y -(a)-> y' ==> f(x,y) -(a)-> h(x',y') ;\n\
                   rule x -(a)-> x' ==> h(x,y) -(a)-> x' ;\n";
        let report = check_comm(&spec(src));
        assert_eq!(report.failed.keys().collect::<Vec<_>>(), vec!["f", "h"]);
        assert_eq!(report.rounds.len(), 3);
        assert!(report.rounds.windows(2).all(|w| w[1].is_subset(&w[0])));
        // and with the mutual dependency both survive
        let src = "spec M\nactions a ;\nop f : 2 ;\nop h : 2 ;\nvar x y x' y' : Proc ;\n\
                   rule x -(a)-> x', y -(a)-> y' ==> f(x,y) -(a)-> h(x',y') ;\n\
                   rule x -(a)-> x', y -(a)-> y' ==> h(x,y) -(a)-> f(x',y') ;\n";
        let report = check_comm(&spec(src));
        assert!(report.is_commutative("f") && report.is_commutative("h"));
    }

    #[test]
    fn surplus_premises_are_allowed() {
        // rule 1 tests both arguments; its mirror tests a subset of the swapped premises
        let src = "spec S\nactions a b ;\nop f : 2 ;\nvar x y x' y' : Proc ;\n\
                   rule x -(a)-> x', y -(a)-> y' ==> f(x,y) -(a)-> 0 ;\n";
        let s = spec(src);
        let th = s.theory();
        let sub = "spec S\nactions a b ;\nop f : 2 ;\nvar x y x' y' : Proc ;\nrule y -(a)-> y' ==> f(x,y) -(a)-> 0 ;\n";
        let b = spec(sub).rules[0].clone();
        assert_eq!(find_mirror(&s.rules[0], &b, &set(&[]), &th).len(), 1);
        assert!(find_mirror(&b, &s.rules[0], &set(&[]), &th).is_empty());
    }
}
