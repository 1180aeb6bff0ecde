//! Acceptance criteria, one line per criterion. Runs without the libtest harness so the
//! report reads top to bottom; exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sosforge_core::axioms::{normalize, NormalizeBudget};
use sosforge_core::bisim::{are_equal, bisimilar, bisimilar_states, refine, DEFAULT_STATE_CAP};
use sosforge_core::comm::check_comm;
use sosforge_core::parser::{parse_label, parse_term};
use sosforge_core::simulate::step;
use sosforge_core::spec::Spec;
use sosforge_core::terms::{canon_label, canon_process, canon_term, Label, Term};

use common::*;

const SEED: u64 = 0x5eed_2024;

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn term(spec: &Spec, src: &str) -> Term {
    parse_term(src, spec, true).unwrap_or_else(|e| panic!("{src}: {e}"))
}

fn step_set(spec: &Spec, p: &Term) -> Result<BTreeSet<(Label, Term)>, String> {
    let th = spec.theory();
    let steps = step(spec, p).map_err(|e| e.to_string())?;
    Ok(steps.into_iter().map(|s| (canon_label(&s.label, &th), canon_term(&s.target, &th))).collect())
}

fn expected_steps(spec: &Spec, pairs: &[(&str, &str)]) -> BTreeSet<(Label, Term)> {
    let th = spec.theory();
    pairs
        .iter()
        .map(|(l, t)| (canon_label(&parse_label(l, spec).unwrap(), &th), canon_term(&term(spec, t), &th)))
        .collect()
}

fn simulation_transcripts() -> Check {
    let par = spec(PAR);
    let got = step_set(&par, &term(&par, "| . 0 || a . 0"))?;
    ensure(got == expected_steps(&par, &[("a", "| . 0 || 0")]), || format!("first transcript: {got:?}"))?;
    let got = step_set(&par, &term(&par, "(| . 0 + b . 0) || (c . 0 + | . 0)"))?;
    let want = expected_steps(
        &par,
        &[("b", "0 || c . 0 + | . 0"), ("c", "| . 0 + b . 0 || 0"), ("|", "0")],
    );
    ensure(got == want, || format!("second transcript: {got:?}"))
}

fn interleaving_bisimilarity() -> Check {
    let par = spec(PAR);
    let r = bisimilar(&par, &term(&par, "a . 0 || b . 0"), &term(&par, "a . b . 0 + b . a . 0"), DEFAULT_STATE_CAP)
        .map_err(|e| e.to_string())?;
    ensure(r.bisimilar, || "expected true".into())
}

fn interleaving_normal_form() -> Check {
    let par = spec(PAR);
    let nf = normalize(&par, &term(&par, "a . 0 || b . 0"), NormalizeBudget::default()).map_err(|e| e.to_string())?;
    let want = canon_process(&term(&par, "a . b . 0 + b . a . 0"), &par.theory()).unwrap();
    ensure(nf == want, || format!("got {nf}"))
}

fn recursive_equality() -> Check {
    let rec = spec(REC);
    let r = are_equal(&rec, "p1", "q1", DEFAULT_STATE_CAP).map_err(|e| e.to_string())?;
    ensure(r.bisimilar, || "expected true".into())?;
    let got: BTreeSet<(String, String)> =
        r.witness.unwrap().pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    let want: BTreeSet<(String, String)> = [("p1", "q1"), ("p1", "q4"), ("p2", "q2"), ("p3", "q3")]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    ensure(got == want, || format!("witness {got:?}"))
}

fn commutativity_reports() -> Check {
    let report = check_comm(&spec(PAR));
    let ws = report.commutative.get("||").ok_or("|| not reported commutative")?;
    let lines: BTreeSet<(usize, usize, String)> =
        ws.iter().map(|w| (w.rule_a.min(w.rule_b), w.rule_a.max(w.rule_b), w.mapping_line())).collect();
    for want in [
        (1, 2, "alpha <- alpha  x' <- y'  x <- y  y' <- x'  y <- x"),
        (3, 3, "x' <- y'  x <- y  y' <- x'  y <- x"),
    ] {
        ensure(lines.iter().any(|(a, b, l)| (*a, *b, l.as_str()) == want), || format!("missing {want:?} in {lines:?}"))?;
    }
    let report = check_comm(&spec(G));
    let ws = report.commutative.get("g").ok_or("g not reported commutative")?;
    let first = ws.iter().find(|w| w.rule_a == 1).ok_or("no mirror for rule 1 of g")?;
    ensure(first.mapping_line() == "k <- l  l <- k  x' <- y'  x <- y  y' <- x'  y <- x", || first.mapping_line())
}

fn linda_use_case() -> Check {
    let linda = spec(LINDA);
    let p = term(&linda, "ask(u) ; tell(v)");
    let nf = normalize(&linda, &p, NormalizeBudget::default()).map_err(|e| e.to_string())?;
    let want = canon_process(&term(&linda, "< {d, u},-,{d, u} > . < {d},-,{d, v} > . | . 0"), &linda.theory()).unwrap();
    ensure(nf == want, || format!("normal form {nf}"))?;
    let r = bisimilar(&linda, &p, &nf, DEFAULT_STATE_CAP).map_err(|e| e.to_string())?;
    ensure(r.bisimilar, || "term and normal form not bisimilar".into())?;
    let report = check_comm(&linda);
    ensure(report.is_commutative("||"), || "|| not commutative".into())?;
    ensure(report.failed.get(";") == Some(&vec![7, 8, 9]), || format!("failed: {:?}", report.failed))
}

fn normalization_soundness() -> Check {
    let mut rng = StdRng::seed_from_u64(SEED);
    let specs = signature_specs();
    for i in 0..500 {
        let s = &specs[i % specs.len()];
        let p = random_term(s, 4, &mut rng);
        let nf = normalize(s, &p, NormalizeBudget::default()).map_err(|e| format!("{p}: {e}"))?;
        let r = bisimilar(s, &p, &nf, DEFAULT_STATE_CAP).map_err(|e| format!("{p}: {e}"))?;
        ensure(r.bisimilar, || format!("{p} is not bisimilar to its normal form {nf}"))?;
    }
    Ok(())
}

fn ground_completeness() -> Check {
    let mut rng = StdRng::seed_from_u64(SEED + 1);
    let specs = signature_specs();
    let commutative: Vec<Vec<String>> =
        specs.iter().map(|s| check_comm(s).commutative.keys().cloned().collect()).collect();
    let (mut equal, mut different) = (0, 0);
    for i in 0..200 {
        let k = i % specs.len();
        let s = &specs[k];
        let comm: Vec<&str> = commutative[k].iter().map(String::as_str).collect();
        let p = random_term(s, 4, &mut rng);
        let mut q = bisimilar_variant(&p, &comm, &mut rng);
        if rng.gen_bool(0.5) {
            q = perturb(s, &q, &mut rng);
        }
        let budget = NormalizeBudget::default();
        let np = normalize(s, &p, budget).map_err(|e| format!("{p}: {e}"))?;
        let nq = normalize(s, &q, budget).map_err(|e| format!("{q}: {e}"))?;
        let r = bisimilar(s, &p, &q, DEFAULT_STATE_CAP).map_err(|e| e.to_string())?;
        ensure(r.bisimilar == (np == nq), || format!("{p} vs {q}: bisimilar {} but normal forms {np} / {nq}", r.bisimilar))?;
        if r.bisimilar {
            equal += 1;
        } else {
            different += 1;
        }
    }
    ensure(equal > 0 && different > 0, || format!("degenerate sample: {equal} equal, {different} different"))
}

fn commutativity_soundness() -> Check {
    let mut rng = StdRng::seed_from_u64(SEED + 2);
    let mut checked = 0;
    for s in signature_specs() {
        for op in check_comm(&s).commutative.keys() {
            for _ in 0..100 {
                let (p, q) = (random_term(&s, 3, &mut rng), random_term(&s, 3, &mut rng));
                let lhs = Term::app(op, vec![p.clone(), q.clone()]);
                let rhs = Term::app(op, vec![q, p]);
                let r = bisimilar(&s, &lhs, &rhs, DEFAULT_STATE_CAP).map_err(|e| format!("{lhs}: {e}"))?;
                ensure(r.bisimilar, || format!("{lhs} is not bisimilar to {rhs}"))?;
                checked += 1;
            }
        }
    }
    ensure(checked >= 300, || format!("only {checked} pairs checked"))
}

fn refinement_matches_oracle() -> Check {
    let mut rng = StdRng::seed_from_u64(SEED + 3);
    for i in 0..100 {
        let n = rng.gen_range(1..=30);
        let lts = random_lts(n, &mut rng);
        let oracle = naive_bisimilarity(&lts);
        let blocks = refine(&lts);
        for s in 0..n {
            for t in 0..n {
                ensure((blocks[s] == blocks[t]) == oracle[s][t], || format!("lts {i}: states {s}, {t} disagree"))?;
            }
        }
        let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        ensure(bisimilar_states(&lts, s, t).0 == oracle[s][t], || format!("lts {i}: query {s} {t}"))?;
    }
    Ok(())
}

type Criterion = (&'static str, Duration, fn() -> Check);

fn main() {
    let criteria: [Criterion; 10] = [
        ("simulation transcripts", Duration::from_millis(100), simulation_transcripts),
        ("interleaving bisimilarity", Duration::from_millis(100), interleaving_bisimilarity),
        ("interleaving normal form", Duration::from_millis(100), interleaving_normal_form),
        ("recursive equality and witness", Duration::from_millis(100), recursive_equality),
        ("commutativity mirrors for || and g", Duration::from_millis(500), commutativity_reports),
        ("Linda normal form, bisimilarity and commutativity", Duration::from_secs(1), linda_use_case),
        ("normalization soundness, 500 terms", Duration::from_secs(60), normalization_soundness),
        ("ground completeness, 200 pairs", Duration::from_secs(60), ground_completeness),
        ("commutativity soundness, 100 pairs per op", Duration::from_secs(30), commutativity_soundness),
        ("refinement vs naive oracle, 100 LTSs", Duration::from_secs(30), refinement_matches_oracle),
    ];
    let mut failures = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let verdict = match (&outcome, took <= *limit) {
            (Ok(()), true) => "PASS".to_string(),
            (Ok(()), false) => "FAIL (too slow)".to_string(),
            (Err(e), _) => format!("FAIL ({e})"),
        };
        if !verdict.starts_with("PASS") {
            failures += 1;
        }
        println!("criterion {:>2}: {verdict} {name} [{:.1} ms, limit {} ms]", i + 1, took.as_secs_f64() * 1e3, limit.as_millis());
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
