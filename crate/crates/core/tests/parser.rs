mod common;

use common::strategies::structure;
use folfriend::{parse_formula, parse_structure, parse_theory, structure_to_json, Error, Formula, ParseError};
use proptest::prelude::*;

#[test]
fn formula_examples() {
    let f = parse_formula("forall x. exists y. E(x,y) & ~E(y,x)", true).unwrap();
    let body = Formula::atom("E", &["x", "y"]).and(Formula::atom("E", &["y", "x"]).not());
    assert_eq!(f, Formula::forall("x", Formula::exists("y", body)));
    assert_eq!(
        parse_formula("P -> Q -> R", true).unwrap(),
        Formula::prop("P").implies(Formula::prop("Q").implies(Formula::prop("R")))
    );
    assert!(matches!(
        parse_formula("x = y", false),
        Err(ParseError::EqualityForbidden { .. })
    ));
}

#[test]
fn theory_examples() {
    let t = parse_theory("forall x. P(x)\nexists x. Q(x)\n").unwrap();
    assert_eq!(t.len(), 2);
    assert_eq!(t.signature().symbols().collect::<Vec<_>>(), vec![("P", 1), ("Q", 1)]);
    let empty = parse_theory("").unwrap();
    assert!(empty.is_empty() && empty.signature().is_empty());
    assert!(matches!(
        parse_theory("E(x,y)"),
        Err(Error::Parse(ParseError::FreeVariableInSentence { line: 1, .. }))
    ));
}

#[test]
fn theory_hints_and_crlf() {
    let t = parse_theory("# graph of a function\r\n#functional F 1\r\nforall x. exists y. F(x,y)\r\n").unwrap();
    assert_eq!(t.signature().functional_output("F"), Some(1));
    let t = parse_theory("#no-equality\nforall x. P(x)\n").unwrap();
    assert!(!t.signature().equality_enabled());
    assert!(parse_theory("#no-equality\nforall x, y. x = y\n").is_err());
}

#[test]
fn structure_examples() {
    let c = parse_structure(r#"{"domain_size":3,"relations":{"E":{"arity":2,"tuples":[[0,1],[1,2],[2,0]]}}}"#).unwrap();
    assert_eq!(c.size(), 3);
    assert_eq!(c.tuple_count("E"), 3);
    let p = parse_structure(r#"{"domain_size":1,"relations":{}}"#).unwrap();
    assert!(p.signature().is_empty());
    assert!(matches!(
        parse_structure(r#"{"domain_size":3,"relations":{"E":{"arity":2,"tuples":[[0,5]]}}}"#),
        Err(Error::Parse(ParseError::TupleOutOfRange { .. }))
    ));
    assert!(matches!(
        parse_structure(r#"{"domain_size":3,"relations":{"E":{"arity":2,"tuples":[[0]]}}}"#),
        Err(Error::Parse(ParseError::ArityMismatch { .. }))
    ));
}

#[test]
fn structure_field_order_is_irrelevant() {
    let a = parse_structure(r#"{"relations":{"P":{"tuples":[[1],[0]],"arity":1}},"domain_size":2}"#).unwrap();
    let b = parse_structure(r#"{"domain_size":2,"relations":{"P":{"arity":1,"tuples":[[0],[1]]}}}"#).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        structure_to_json(&a),
        r#"{"domain_size":2,"relations":{"P":{"arity":1,"tuples":[[0],[1]]}}}"#
    );
}

proptest! {
    #[test]
    fn structure_json_round_trips(s in structure(4)) {
        let text = structure_to_json(&s);
        let back = parse_structure(&text).unwrap();
        prop_assert!(back.same_interpretation(&s));
        prop_assert_eq!(structure_to_json(&back), text);
    }

    #[test]
    fn structure_parsing_never_panics(text in "[{}\\[\\]\":,0-9a-z_A-Z ]{0,60}") {
        let _ = parse_structure(&text);
    }
}
