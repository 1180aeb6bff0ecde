mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use sosforge_core::parser::{parse_spec, parse_term, ParseErrorKind};
use sosforge_core::terms::{canon_term, Term};
use sosforge_core::validate::{check_gsos, validate, ViolationKind};

use common::*;

fn corpus() -> Vec<&'static str> {
    vec![BCCSP, PAR, G, REC, LINDA]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rendered_terms_parse_back(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        for s in signature_specs() {
            let p = random_term(&s, 4, &mut rng);
            let text = p.to_string();
            let back = parse_term(&text, &s, true).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
            let th = s.theory();
            prop_assert_eq!(canon_term(&back, &th), canon_term(&p, &th), "{}", text);
            // parsing canonicalizes labels, so the text is stable from the second round on
            let again = parse_term(&back.to_string(), &s, true).unwrap();
            prop_assert_eq!(again.to_string(), back.to_string());
        }
    }

    #[test]
    fn unknown_names_are_located(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let s = spec(PAR);
        let text = random_term(&s, 3, &mut rng).to_string();
        let bad = format!("{text} + zz");
        let err = parse_term(&bad, &s, true).unwrap_err();
        prop_assert_eq!(err.kind, ParseErrorKind::UnknownSymbol("zz".into()));
        prop_assert_eq!((err.line, err.column), (1, text.chars().count() + 4));
        // the same name on a definition line further down a spec file
        let blank = rng.gen_range(0..4);
        let src = format!("{PAR}{}def bad = {text} + zz ;\n", "\n".repeat(blank));
        let err = parse_spec(&src).unwrap_err();
        prop_assert_eq!(err.line, PAR.lines().count() + blank + 1);
        prop_assert_eq!(err.column, "def bad = ".len() + text.chars().count() + 4);
    }

    #[test]
    fn specs_survive_rendering_with_shuffled_rules(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let src = corpus()[rng.gen_range(0..5)];
        let mut s = spec(src);
        s.rules.shuffle(&mut rng);
        let back = parse_spec(&s.to_string()).unwrap();
        prop_assert_eq!(&back, &s);
        let kinds = |v: Vec<sosforge_core::validate::Violation>| {
            let mut k: Vec<ViolationKind> = v.into_iter().map(|v| v.kind).collect();
            k.sort_by_key(|k| k.to_string());
            k
        };
        prop_assert_eq!(kinds(validate(&back)), kinds(validate(&spec(src))));
    }

    #[test]
    fn reusing_a_source_variable_as_premise_target_is_caught(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut s = spec([PAR, G, LINDA][rng.gen_range(0..3)]);
        let candidates: Vec<usize> = (0..s.rules.len()).filter(|&i| !s.rules[i].positives.is_empty()).collect();
        let i = *candidates.choose(&mut rng).unwrap();
        let rule = &mut s.rules[i];
        let args: Vec<Term> = rule.source_args().to_vec();
        let k = rng.gen_range(0..rule.positives.len());
        rule.positives[k].target = args.choose(&mut rng).unwrap().clone();
        let found = check_gsos(&s);
        prop_assert!(
            found.iter().any(|v| v.rule == Some(i + 1) && v.kind == ViolationKind::TargetVarReuse),
            "{:?}", found
        );
    }

    #[test]
    fn testing_a_premise_target_is_caught(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut s = spec([PAR, G][rng.gen_range(0..2)]);
        let i = rng.gen_range(0..s.rules.len());
        let rule = &mut s.rules[i];
        let Some(first) = rule.positives.first().cloned() else { return Ok(()) };
        let mut chained = first.clone();
        chained.source = first.target.clone();
        chained.target = Term::var("z");
        rule.positives.push(chained);
        let found = check_gsos(&s);
        prop_assert!(
            found.iter().any(|v| v.rule == Some(i + 1) && v.kind == ViolationKind::PremiseOnNonArgument),
            "{:?}", found
        );
    }
}
