use folfriend::beth::{find_explicit_definition_in, implicitly_defines_in};
use folfriend::corpus::defined_by_edges;
use folfriend::formula_enum::{random_theory, rng, small_signature};
use folfriend::semantics::{satisfies_all, SearchOptions};
use folfriend::{
    entails_bounded, eval_sentence, find_explicit_definition, implicitly_defines, parse_formula, Definability, Error,
    Formula, Theory,
};

fn biconditional(psi: &Formula) -> Formula {
    Formula::forall("x", psi.clone().iff(Formula::atom("P", &["x"])))
}

#[test]
fn edges_define_p() {
    let gamma = defined_by_edges();
    assert_eq!(
        implicitly_defines(&gamma, "P", 4).unwrap(),
        Definability::Defined { bound: 4 }
    );
    let psi = find_explicit_definition(&gamma, "P", 2, 4).unwrap().unwrap();
    assert!(psi.relation_names().iter().all(|r| r != "P"));
    assert!(!entails_bounded(&gamma, &biconditional(&psi), 4).unwrap().is_refuted());
}

#[test]
fn empty_theory_leaves_p_free() {
    let sig = small_signature(&["P"], &["E"]);
    let gamma = Theory::over(sig.clone());
    match implicitly_defines_in(&sig, &gamma, "P", 3, &SearchOptions::default()).unwrap() {
        Definability::Counterexample { base, with_p, other } => {
            assert_eq!(base.size(), 1);
            assert_ne!(with_p.holds("P", &[0]), other.holds("P", &[0]));
            assert_eq!(with_p.reduct(base.signature()).unwrap(), base);
            assert_eq!(other.reduct(base.signature()).unwrap(), base);
        }
        d => panic!("unexpected {d:?}"),
    }
    assert_eq!(
        find_explicit_definition_in(&sig, &gamma, "P", 2, 3, &SearchOptions::default()).unwrap(),
        None
    );
}

#[test]
fn counterexample_expansions_satisfy_gamma() {
    let gamma = Theory::from_sentences([parse_formula("forall x. (P(x) -> exists y. E(x,y))", true).unwrap()]).unwrap();
    let Definability::Counterexample { with_p, other, .. } = implicitly_defines(&gamma, "P", 3).unwrap() else {
        panic!("P is not pinned down")
    };
    assert!(satisfies_all(&with_p, gamma.sentences()).unwrap());
    assert!(satisfies_all(&other, gamma.sentences()).unwrap());
    assert!(!with_p.same_interpretation(&other));
}

#[test]
fn binary_symbol() {
    let gamma =
        Theory::from_sentences([parse_formula("forall x1, x2. (R(x1,x2) <-> (E(x1,x2) & E(x2,x1)))", true).unwrap()])
            .unwrap();
    assert!(implicitly_defines(&gamma, "R", 3).unwrap().is_defined());
    let psi = find_explicit_definition(&gamma, "R", 2, 3).unwrap().unwrap();
    let bic = Formula::forall("x1", Formula::forall("x2", psi.iff(Formula::atom("R", &["x1", "x2"]))));
    assert!(!entails_bounded(&gamma, &bic, 3).unwrap().is_refuted());
}

#[test]
fn unknown_symbol() {
    assert!(matches!(
        implicitly_defines(&defined_by_edges(), "Q", 2),
        Err(Error::UnknownRelation(_))
    ));
}

#[test]
fn explicit_success_implies_implicit() {
    let sig = small_signature(&["P"], &["E"]);
    let base = small_signature(&[], &["E"]);
    let mut r = rng(91);
    let (mut found, mut trials) = (0, 0);
    while trials < 60 {
        trials += 1;
        let mut gamma = random_theory(&mut r, &base, 1, 3);
        // Tie P to a random formula over E, or to nothing at all.
        if trials % 3 != 0 {
            let body = folfriend::formula_enum::random_formula(&mut r, &base, &["x", "y"], 2);
            let body = if body.free_vars().contains("y") {
                Formula::exists("y", body)
            } else {
                body
            };
            gamma
                .push(Formula::forall("x", Formula::atom("P", &["x"]).iff(body)))
                .unwrap();
        }
        let implicit = implicitly_defines_in(&sig, &gamma, "P", 3, &SearchOptions::default()).unwrap();
        if let Some(psi) = find_explicit_definition_in(&sig, &gamma, "P", 2, 3, &SearchOptions::default()).unwrap() {
            found += 1;
            assert!(implicit.is_defined(), "{:?} {psi}", gamma.sentences());
            for m in folfriend::enumerate_models(&gamma, 2).unwrap() {
                assert!(eval_sentence(&m, &biconditional(&psi)).unwrap());
            }
        }
    }
    assert!(found >= 10, "{found}");
}
