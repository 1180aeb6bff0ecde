use super::*;
use crate::terms::{Sort, Term};

const BCCSP: &str = include_str!("../../corpus/bccsp.sos");
const PAR: &str = include_str!("../../corpus/bccsp_par.sos");
const G: &str = include_str!("../../corpus/g.sos");
const REC: &str = include_str!("../../corpus/recursion.sos");
const LINDA: &str = include_str!("../../corpus/linda.sos");

fn kind(r: Result<Spec, ParseError>) -> ParseErrorKind {
    r.unwrap_err().kind
}

#[test]
fn parses_core_calculus() {
    let spec = parse_spec(BCCSP).unwrap();
    assert_eq!(spec.rules.len(), 3);
    assert_eq!(spec.actions, vec!["a", "b", "c"]);
    assert_eq!(spec.rules[0].to_string(), "==> l . x -(l)-> x");
}

#[test]
fn parses_whole_corpus() {
    for src in [BCCSP, PAR, G, REC, LINDA] {
        let spec = parse_spec(src).unwrap();
        let again = parse_spec(&spec.to_string()).unwrap();
        assert_eq!(spec, again, "round trip of\n{spec}");
    }
}

#[test]
fn reserved_names_cannot_be_redeclared() {
    let src = "spec S\nop _+_ : 2 ;\n";
    assert_eq!(kind(parse_spec(src)), ParseErrorKind::DuplicateDeclaration("+".into()));
    let src = "spec S\nactions a b a ;\n";
    let err = parse_spec(src).unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::DuplicateDeclaration("a".into()));
    assert_eq!((err.line, err.column), (2, 13));
}

#[test]
fn empty_rule_block() {
    let spec = parse_spec("spec EMPTY\nactions a ;\n").unwrap();
    assert!(spec.rules.is_empty());
}

#[test]
fn unknown_symbols_and_arity() {
    let src = "spec S\nactions a ;\nvar x : Proc ;\nrule x -(b)-> x ==> x -(a)-> x ;\n";
    assert_eq!(kind(parse_spec(src)), ParseErrorKind::UnknownSymbol("b".into()));
    let src = "spec S\nactions a ;\nop f : 2 ;\nvar x : Proc ;\nrule ==> f(x) -(a)-> x ;\n";
    assert_eq!(
        kind(parse_spec(src)),
        ParseErrorKind::ArityMismatch { op: "f".into(), expected: 2, found: 1 }
    );
}

#[test]
fn syntax_errors_carry_positions() {
    let err = parse_spec("spec S\nactions a ;\nrule ==> a . 0 -(a) 0 ;\n").unwrap_err();
    assert!(matches!(err.kind, ParseErrorKind::Syntax { .. }));
    assert_eq!((err.line, err.column), (3, 19));
}

#[test]
fn term_precedence() {
    let spec = parse_spec(PAR).unwrap();
    let t = parse_term("| . 0 || a . 0", &spec, true).unwrap();
    assert_eq!(
        t,
        Term::app(
            "||",
            vec![
                Term::prefix(Label::predicate("|"), Term::Nil),
                Term::prefix(Label::action("a"), Term::Nil)
            ]
        )
    );
    let t = parse_term("a . b . 0 + b . a . 0", &spec, true).unwrap();
    assert_eq!(t.to_string(), "a . b . 0 + b . a . 0");
    assert!(matches!(t, Term::Choice(..)));
    let t = parse_term("| . 0 + b . 0 || c . 0 + | . 0", &spec, true).unwrap();
    assert!(matches!(&t, Term::App(op, _) if op == "||"));
    assert_eq!(parse_term("a.0+0", &spec, true).unwrap().to_string(), "a . 0 + 0");
}

#[test]
fn infix_is_left_associative() {
    let spec = parse_spec(PAR).unwrap();
    let t = parse_term("a . 0 || b . 0 || c . 0", &spec, true).unwrap();
    let Term::App(_, args) = &t else { panic!() };
    assert!(matches!(&args[0], Term::App(op, _) if op == "||"));
    let t = parse_term("a . 0 || (b . 0 || c . 0)", &spec, true).unwrap();
    assert_eq!(t.to_string(), "a . 0 || (b . 0 || c . 0)");
}

#[test]
fn closed_terms_reject_variables() {
    let spec = parse_spec(PAR).unwrap();
    let err = parse_term("x", &spec, true).unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::UnboundVariable("x".into()));
    assert_eq!((err.line, err.column), (1, 1));
    assert_eq!(parse_term("x", &spec, false).unwrap(), Term::var("x"));
    let err = parse_term("a . zz", &spec, true).unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::UnknownSymbol("zz".into()));
}

#[test]
fn sort_discipline_in_terms() {
    let spec = parse_spec(LINDA).unwrap();
    assert!(matches!(
        parse_term("u . 0", &spec, true).unwrap_err().kind,
        ParseErrorKind::Sort(_)
    ));
    let t = parse_term("ask(u) ; tell(v)", &spec, true).unwrap();
    assert_eq!(t.to_string(), "ask(u) ; tell(v)");
    let t = parse_term("< {u, d},-,{d, u, empty} > . | . 0", &spec, true).unwrap();
    assert_eq!(t.to_string(), "< {d, u},-,{d, u} > . | . 0");
}

#[test]
fn linda_declarations() {
    let spec = parse_spec(LINDA).unwrap();
    assert_eq!(spec.rules.len(), 9);
    assert_eq!(spec.variables["mu"], crate::spec::VarSort::Label(Sort::Data("Data".into())));
    assert_eq!(spec.rules[0].to_string(), "==> ask(mu) -(< {d, mu},-,{d, mu} >)-> | . 0");
    assert_eq!(spec.rules[6].conclusion.to_string(), "x ; y -(< xD,-,xD' >)-> x' ; y");
}

#[test]
fn forward_references_to_definitions() {
    let spec = parse_spec(REC).unwrap();
    assert_eq!(spec.defs.len(), 7);
    assert_eq!(spec.defs["q2"].to_string(), "i . q3 + o . q4");
}

#[test]
fn label_parsing() {
    let spec = parse_spec(G).unwrap();
    assert_eq!(parse_label("mix(b,a)", &spec).unwrap().to_string(), "mix(a,b)");
    assert!(parse_label("g(0,0)", &spec).is_err());
}

#[test]
fn rule_positions_recorded() {
    let spec = parse_spec(PAR).unwrap();
    assert_eq!(spec.source_map.rules.len(), 3);
    assert_eq!(spec.rule_pos(0).unwrap().line, 9);
}
