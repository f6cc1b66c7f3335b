mod common;

use common::{all_structures, bipartite, dedekind_function_exists};
use folfriend::corpus::{
    at_least_schema, dedekind, odd_cycle_free_graphs, singleton_with_complement, singleton_with_relation,
    triangle_free_graphs, two_coloring,
};
use folfriend::friendliness::find_witness_with;
use folfriend::par::Schedule;
use folfriend::semantics::{satisfies_all, SearchOptions};
use folfriend::{
    bounded_friendly, bounded_friendly_with, entails_bounded, find_witness, parse_formula, validate_witness,
    BaseRelation, BoundedEntailmentVerdict, BoundedVerdict, ExpansionRelation, FiniteStructure, Formula,
    FriendlinessConfig, Signature, Theory,
};
use BaseRelation::*;
use ExpansionRelation::*;

fn f(text: &str) -> Formula {
    parse_formula(text, true).unwrap()
}

fn theory(lines: &[&str]) -> Theory {
    Theory::from_sentences(lines.iter().map(|l| f(l))).unwrap()
}

fn five_cycle() -> FiniteStructure {
    let mut c = FiniteStructure::new(Signature::from_symbols([("E", 2)]).unwrap(), 5).unwrap();
    for i in 0..5 {
        c.insert("E", &[i, (i + 1) % 5]).unwrap();
        c.insert("E", &[(i + 1) % 5, i]).unwrap();
    }
    c
}

#[test]
fn witness_for_existential_expansion() {
    let gamma = theory(&["exists x. P(x)"]);
    let mut a = FiniteStructure::new(gamma.signature().clone(), 2).unwrap();
    a.insert("P", &[0]).unwrap();
    let cfg = FriendlinessConfig::new(R1, S1, 2, 2);
    let w = find_witness(&a, &gamma, &f("exists x. Q(x)"), &cfg).unwrap().unwrap();
    assert_eq!(w.a_dprime.reduct(gamma.signature()).unwrap(), a);
    // Cells are tried false before true in tuple order, so Q = {1} comes
    // before Q = {0} and Q = {0, 1}.
    assert_eq!(w.a_dprime.tuples("Q").collect::<Vec<_>>(), vec![vec![1]]);
    assert!(validate_witness(&gamma, &f("exists x. Q(x)"), &cfg, &w).unwrap());
}

#[test]
fn singleton_loop_has_no_finite_witness() {
    let gamma = singleton_with_relation();
    let mut a = FiniteStructure::new(gamma.signature().clone(), 1).unwrap();
    a.insert("R", &[0, 0]).unwrap();
    assert_eq!(
        find_witness(&a, &gamma, &dedekind(), &FriendlinessConfig::new(R1, S1, 1, 1)).unwrap(),
        None
    );
    assert_eq!(
        find_witness(&a, &gamma, &dedekind(), &FriendlinessConfig::new(R1, S3, 1, 6)).unwrap(),
        None
    );
    // Independently: no total injective non-surjective function on at
    // most six points, so no finite structure satisfies the sentence.
    assert!((1..=6).all(|n| !dedekind_function_exists(n)));
}

#[test]
fn friendly_up_to_bounds() {
    let gamma = theory(&["exists x. P(x)"]);
    let v = bounded_friendly(&gamma, &f("exists x. Q(x)"), &FriendlinessConfig::new(R1, S1, 3, 3)).unwrap();
    let BoundedVerdict::FriendlyUpToBounds { witnesses } = &v else {
        panic!("expected friendly")
    };
    assert_eq!(witnesses.len(), 6);
    assert!(!v.is_conclusive());
    assert!(v
        .caveat(&FriendlinessConfig::new(R1, S1, 3, 3))
        .unwrap()
        .contains("infinite"));
}

#[test]
fn triangle_free_graphs_are_not_two_colourable() {
    let cfg = FriendlinessConfig::new(R1, S1, 5, 5);
    match bounded_friendly(&triangle_free_graphs(), &two_coloring(), &cfg).unwrap() {
        BoundedVerdict::NotFriendlyWithinBounds {
            refuting_base,
            conclusive,
        } => {
            assert!(conclusive);
            assert!(refuting_base.is_isomorphic(&five_cycle()).unwrap());
            assert!(!bipartite(&refuting_base));
        }
        v => panic!("unexpected {v:?}"),
    }
    let v = bounded_friendly(&odd_cycle_free_graphs(5), &two_coloring(), &cfg).unwrap();
    assert!(v.is_friendly());
}

#[test]
fn colouring_verdicts_match_bipartiteness() {
    // For each graph on at most five vertices: it has a witness for the
    // colouring sentence exactly when breadth-first colouring succeeds.
    let e = Signature::from_symbols([("E", 2)]).unwrap();
    let cfg = FriendlinessConfig::new(R1, S1, 5, 5);
    let simple = theory(&["forall x, y. (E(x,y) -> E(y,x))", "forall x. ~E(x,x)"]);
    let gamma_odd = odd_cycle_free_graphs(5);
    for n in 1..=4 {
        for g in all_structures(&e, n) {
            if !satisfies_all(&g, simple.sentences()).unwrap() {
                continue;
            }
            let w = find_witness(&g, &simple, &two_coloring(), &cfg).unwrap();
            assert_eq!(w.is_some(), bipartite(&g));
            assert_eq!(satisfies_all(&g, gamma_odd.sentences()).unwrap(), bipartite(&g));
        }
    }
    for g in folfriend::enumerate_models(&simple, 5).unwrap() {
        let w = find_witness(&g, &simple, &two_coloring(), &cfg).unwrap();
        assert_eq!(w.is_some(), bipartite(&g));
        assert_eq!(satisfies_all(&g, gamma_odd.sentences()).unwrap(), bipartite(&g));
    }
}

#[test]
fn schema_fragments_refute_dedekind() {
    for k in 1..=4 {
        let cfg = FriendlinessConfig::new(R3, S1, k, k);
        let v = bounded_friendly(&at_least_schema(k), &dedekind(), &cfg).unwrap();
        match v {
            BoundedVerdict::NotFriendlyWithinBounds {
                refuting_base,
                conclusive,
            } => {
                assert!(conclusive);
                assert_eq!(refuting_base.size(), k);
            }
            v => panic!("fragment {k}: {v:?}"),
        }
    }
}

#[test]
fn reduction_case_failures() {
    let gamma = singleton_with_relation();
    let phi = dedekind();
    match entails_bounded(&gamma, &phi, 4).unwrap() {
        BoundedEntailmentVerdict::Refuted(c) => assert_eq!(c.size(), 1),
        v => panic!("unexpected {v:?}"),
    }
    assert_eq!(
        entails_bounded(&gamma, &phi.clone().not(), 4).unwrap(),
        BoundedEntailmentVerdict::EntailedUpToBound(4)
    );
    let cfg = FriendlinessConfig::new(R1, S3, 1, 6);
    let v = bounded_friendly(&gamma, &phi, &cfg).unwrap();
    assert!(!v.is_friendly() && !v.is_conclusive());
    assert!(v.caveat(&cfg).unwrap().contains("infinite"));

    let gamma = singleton_with_complement();
    let cfg = FriendlinessConfig::new(R1, S2, 1, 6);
    let v = bounded_friendly(&gamma, &phi, &cfg).unwrap();
    assert!(!v.is_friendly() && !v.is_conclusive());
    assert!(entails_bounded(&gamma, &phi, 4).unwrap().is_refuted());
}

#[test]
fn first_reduction_at_bounds() {
    let mut r = folfriend::formula_enum::rng(8);
    let sig = folfriend::formula_enum::small_signature(&["P"], &["E"]);
    for _ in 0..40 {
        let gamma = folfriend::formula_enum::random_theory(&mut r, &sig, 2, 3);
        let phi = folfriend::formula_enum::random_sentence(&mut r, &sig, 3);
        let v = bounded_friendly(&gamma, &phi, &FriendlinessConfig::new(R3, S1, 3, 3)).unwrap();
        let e = entails_bounded(&gamma, &phi, 3).unwrap();
        assert_eq!(!v.is_friendly(), e.is_refuted(), "{:?} {phi}", gamma.sentences());
    }
}

#[test]
fn supraclassical_on_curated_entailments() {
    // Each pair is a classical consequence.
    let cases = [
        (vec!["forall x. (P(x) -> Q(x))", "forall x. P(x)"], "forall x. Q(x)"),
        (vec!["forall x. exists y. E(x,y)"], "exists x, y. E(x,y)"),
        (
            vec!["forall x, y. (E(x,y) -> E(y,x))", "exists x, y. E(x,y)"],
            "exists x, y. (E(x,y) & E(y,x))",
        ),
        (vec![], "forall x. (P(x) | ~P(x))"),
    ];
    for (gamma, phi) in cases {
        let gamma = theory(&gamma);
        let phi = f(phi);
        assert!(!entails_bounded(&gamma, &phi, 3).unwrap().is_refuted());
        assert!(bounded_friendly(&gamma, &phi, &FriendlinessConfig::new(R1, S1, 3, 3))
            .unwrap()
            .is_friendly());
    }
}

#[test]
fn verdicts_are_schedule_independent() {
    let gamma = triangle_free_graphs();
    let cfg = FriendlinessConfig::new(R2, S3, 4, 5);
    let phi = f("exists x. forall y. (E(x,y) -> B(y))");
    let opts = SearchOptions::default();
    let par = bounded_friendly_with(&gamma, &phi, &cfg, &opts, Schedule::Parallel).unwrap();
    let seq = bounded_friendly_with(&gamma, &phi, &cfg, &opts, Schedule::Sequential).unwrap();
    assert_eq!(par.verdict, seq.verdict);
    assert_eq!(par.base_models, seq.base_models);
}

#[test]
fn witness_search_charges_the_budget() {
    let gamma = theory(&["forall x. exists y. E(x,y)"]);
    let mut a = FiniteStructure::new(gamma.signature().clone(), 3).unwrap();
    for i in 0..3 {
        a.insert("E", &[i, (i + 1) % 3]).unwrap();
    }
    let phi = f("forall x, y. (F(x,y) <-> ~E(x,y)) & exists x. forall y. (G(x,y) -> F(y,x))");
    let cfg = FriendlinessConfig::new(R1, S3, 3, 5);
    let tight = SearchOptions::with_budget(1);
    assert!(matches!(
        find_witness_with(&a, &gamma, &phi, &cfg, &tight),
        Err(folfriend::Error::ResourceBudgetExceeded { .. }) | Ok((Some(_), _))
    ));
}

#[test]
fn property_suite_bounded() {
    let report = common::suites::prop6_bounded(43, 40, 3);
    assert!(report.violations.is_empty(), "{:?}", report.violations);
}

#[test]
fn lattice_relations() {
    let report = common::suites::lattice(47, 25, 3, 4);
    assert!(report.violations.is_empty(), "{:?}", report.violations);
}
