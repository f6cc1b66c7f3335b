//! Proptest strategies for formulas and structures.

use folfriend::{FiniteStructure, Formula, Signature};
use proptest::prelude::*;

const VARS: [&str; 3] = ["x", "y", "z"];

fn var() -> impl Strategy<Value = &'static str> {
    prop::sample::select(&VARS[..])
}

fn atom() -> impl Strategy<Value = Formula> {
    prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        Just(Formula::prop("Q")),
        var().prop_map(|v| Formula::atom("P", &[v])),
        (var(), var()).prop_map(|(a, b)| Formula::atom("E", &[a, b])),
        (var(), var()).prop_map(|(a, b)| Formula::eq(a, b)),
    ]
}

/// Formulas over `{Q/0, P/1, E/2}` with equality and variables `x, y, z`.
pub fn formula() -> impl Strategy<Value = Formula> {
    atom().prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.iff(b)),
            (var(), inner.clone()).prop_map(|(v, a)| Formula::forall(v, a)),
            (var(), inner).prop_map(|(v, a)| Formula::exists(v, a)),
        ]
    })
}

/// Sentences: formulas with every free variable bound at the front.
pub fn sentence() -> impl Strategy<Value = Formula> {
    (formula(), any::<u8>()).prop_map(|(f, bits)| {
        let free: Vec<String> = f.free_vars().into_iter().collect();
        free.iter().enumerate().fold(f, |body, (i, v)| {
            if bits >> i & 1 == 1 {
                Formula::exists(v, body)
            } else {
                Formula::forall(v, body)
            }
        })
    })
}

pub fn signature() -> Signature {
    Signature::from_symbols([("Q", 0), ("P", 1), ("E", 2)]).unwrap()
}

/// Structures over [`signature`] with 1 to `max` elements.
pub fn structure(max: usize) -> impl Strategy<Value = FiniteStructure> {
    (1..=max)
        .prop_flat_map(|n| {
            (
                Just(n),
                any::<bool>(),
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec(any::<bool>(), n * n),
            )
        })
        .prop_map(|(n, q, p, e)| {
            let mut s = FiniteStructure::new(signature(), n).unwrap();
            s.set("Q", &[], q).unwrap();
            for (i, &b) in p.iter().enumerate() {
                s.set("P", &[i], b).unwrap();
            }
            for (i, &b) in e.iter().enumerate() {
                s.set("E", &[i / n, i % n], b).unwrap();
            }
            s
        })
}

/// A permutation of `0..n`.
pub fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}
