//! Corpus access, random closed terms and brute-force oracles shared by the test targets.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::rngs::StdRng;
use rand::Rng;
use sosforge_core::bisim::Lts;
use sosforge_core::parser::parse_spec;
use sosforge_core::simulate::Simulator;
use sosforge_core::spec::Spec;
use sosforge_core::terms::{canon_term, Label, Term};

pub const BCCSP: &str = include_str!("../../corpus/bccsp.sos");
pub const PAR: &str = include_str!("../../corpus/bccsp_par.sos");
pub const G: &str = include_str!("../../corpus/g.sos");
pub const REC: &str = include_str!("../../corpus/recursion.sos");
pub const LINDA: &str = include_str!("../../corpus/linda.sos");

pub fn spec(src: &str) -> Spec {
    parse_spec(src).expect("corpus spec parses")
}

/// The specs whose operators make up the random-term signature.
pub fn signature_specs() -> Vec<Spec> {
    vec![spec(PAR), spec(G), spec(LINDA)]
}

fn data(rng: &mut StdRng) -> Label {
    let pool = ["u", "v", "d"];
    let n = rng.gen_range(1..=2);
    let elems: Vec<Label> = (0..n).map(|_| Label::Const(pool[rng.gen_range(0..3)].into())).collect();
    if elems.len() == 1 {
        elems.into_iter().next().unwrap()
    } else {
        Label::MSet(elems)
    }
}

/// A label that can prefix processes of `spec`.
pub fn random_label(spec: &Spec, rng: &mut StdRng) -> Label {
    if !spec.data_sorts.is_empty() {
        return if rng.gen_bool(0.3) {
            Label::predicate(&spec.predicates[0])
        } else {
            Label::Triple(Box::new(data(rng)), Box::new(data(rng)))
        };
    }
    let k = rng.gen_range(0..spec.actions.len() + spec.predicates.len());
    match spec.actions.get(k) {
        Some(a) => Label::action(a),
        None => Label::predicate(&spec.predicates[k - spec.actions.len()]),
    }
}

/// Closed core-calculus term of depth at most `depth`.
pub fn random_bccsp(spec: &Spec, depth: usize, rng: &mut StdRng) -> Term {
    if depth == 0 {
        return Term::Nil;
    }
    match rng.gen_range(0..4) {
        0 => Term::Nil,
        1 | 2 => Term::prefix(random_label(spec, rng), random_bccsp(spec, depth - 1, rng)),
        _ => Term::choice(random_bccsp(spec, depth - 1, rng), random_bccsp(spec, depth - 1, rng)),
    }
}

/// Closed term of depth at most `depth` over the core calculus and the spec's operators.
pub fn random_term(spec: &Spec, depth: usize, rng: &mut StdRng) -> Term {
    if depth == 0 {
        return Term::Nil;
    }
    match rng.gen_range(0..6) {
        0 => Term::Nil,
        1 | 2 => Term::prefix(random_label(spec, rng), random_term(spec, depth - 1, rng)),
        3 => Term::choice(random_term(spec, depth - 1, rng), random_term(spec, depth - 1, rng)),
        _ => {
            let op = &spec.proc_ops[rng.gen_range(0..spec.proc_ops.len())];
            let args = (0..op.arity)
                .map(|_| {
                    if op.arity == 1 && !spec.data_sorts.is_empty() {
                        Term::Data(data(rng))
                    } else {
                        random_term(spec, depth - 1, rng)
                    }
                })
                .collect();
            Term::App(op.name.clone(), args)
        }
    }
}

/// A term bisimilar to `p` by construction: summands permuted and duplicated, `0` summands
/// added, arguments of commutative operators swapped, all at random positions.
pub fn bisimilar_variant(p: &Term, commutative: &[&str], rng: &mut StdRng) -> Term {
    let out = match p {
        Term::Choice(a, b) => {
            let (a, b) = (bisimilar_variant(a, commutative, rng), bisimilar_variant(b, commutative, rng));
            if rng.gen_bool(0.5) {
                Term::choice(b, a)
            } else {
                Term::choice(a, b)
            }
        }
        Term::Prefix(l, body) => Term::prefix(l.clone(), bisimilar_variant(body, commutative, rng)),
        Term::App(op, args) => {
            let mut args: Vec<Term> = args.iter().map(|a| bisimilar_variant(a, commutative, rng)).collect();
            if args.len() == 2 && commutative.contains(&op.as_str()) && rng.gen_bool(0.5) {
                args.swap(0, 1);
            }
            Term::App(op.clone(), args)
        }
        other => other.clone(),
    };
    match rng.gen_range(0..6) {
        0 => Term::choice(out.clone(), out),
        1 => Term::choice(Term::Nil, out),
        _ => out,
    }
}

/// Change one label somewhere in `p`, which usually breaks bisimilarity.
pub fn perturb(spec: &Spec, p: &Term, rng: &mut StdRng) -> Term {
    match p {
        Term::Prefix(l, body) => {
            if rng.gen_bool(0.4) {
                Term::prefix(random_label(spec, rng), (**body).clone())
            } else {
                Term::prefix(l.clone(), perturb(spec, body, rng))
            }
        }
        Term::Choice(a, b) => {
            if rng.gen_bool(0.5) {
                Term::choice(perturb(spec, a, rng), (**b).clone())
            } else {
                Term::choice((**a).clone(), perturb(spec, b, rng))
            }
        }
        Term::App(op, args) if !args.is_empty() => {
            let mut args = args.clone();
            let k = rng.gen_range(0..args.len());
            args[k] = perturb(spec, &args[k], rng);
            Term::App(op.clone(), args)
        }
        _ => Term::prefix(random_label(spec, rng), p.clone()),
    }
}

/// Whether `rel` is a strong bisimulation: checked pair by pair against the one-step
/// semantics, in both directions, without any refinement.
pub fn is_bisimulation(spec: &Spec, rel: &BTreeSet<(Term, Term)>) -> bool {
    let th = spec.theory();
    let mut sim = Simulator::new(spec);
    let canon_rel: HashSet<(Term, Term)> =
        rel.iter().map(|(a, b)| (canon_term(a, &th), canon_term(b, &th))).collect();
    for (s, t) in &canon_rel {
        let (Ok(ss), Ok(ts)) = (sim.step(s), sim.step(t)) else { return false };
        let matched = |from: &[sosforge_core::simulate::Step], to: &[sosforge_core::simulate::Step], flip: bool| {
            from.iter().all(|x| {
                to.iter().any(|y| {
                    let pair = if flip {
                        (canon_term(&y.target, &th), canon_term(&x.target, &th))
                    } else {
                        (canon_term(&x.target, &th), canon_term(&y.target, &th))
                    };
                    x.label == y.label && canon_rel.contains(&pair)
                })
            })
        };
        if !matched(&ss, &ts, false) || !matched(&ts, &ss, true) {
            return false;
        }
    }
    true
}

/// Greatest bisimulation on an explicit LTS by iterated removal of pairs that fail the
/// transfer condition. Quadratic in states per round; only for small systems.
pub fn naive_bisimilarity(lts: &Lts) -> Vec<Vec<bool>> {
    let n = lts.len();
    let mut rel = vec![vec![true; n]; n];
    loop {
        let mut changed = false;
        for s in 0..n {
            for t in 0..n {
                if !rel[s][t] {
                    continue;
                }
                let forth = lts.transitions[s]
                    .iter()
                    .all(|&(l, s2)| lts.transitions[t].iter().any(|&(l2, t2)| l == l2 && rel[s2][t2]));
                let back = lts.transitions[t]
                    .iter()
                    .all(|&(l, t2)| lts.transitions[s].iter().any(|&(l2, s2)| l == l2 && rel[s2][t2]));
                if !(forth && back) {
                    rel[s][t] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return rel;
        }
    }
}

/// Random LTS with `n` states over labels a, b, c.
pub fn random_lts(n: usize, rng: &mut StdRng) -> Lts {
    let labels = ["a", "b", "c"];
    let density = rng.gen_range(0.02..0.15);
    let mut edges = Vec::new();
    for s in 0..n {
        for t in 0..n {
            for l in labels {
                if rng.gen_bool(density) {
                    edges.push((s, l, t));
                }
            }
        }
    }
    Lts::from_edges(n, &edges)
}
