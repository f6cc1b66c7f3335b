//! Built-in theories and sentences used by tests, benches and the CLI.

use crate::parser::parse_formula;
use crate::syntax::{Formula, Theory};

fn f(text: &str) -> Formula {
    parse_formula(text, true).unwrap_or_else(|e| panic!("corpus formula {text:?}: {e}"))
}

fn theory(lines: &[&str]) -> Theory {
    Theory::from_sentences(lines.iter().map(|l| f(l))).expect("corpus theory")
}

/// Field axioms with addition and multiplication as ternary relations
/// (output last) and the constants as unary relations.
pub fn field_axioms() -> Theory {
    let mut t = theory(&[
        // Every operation and constant is total and single-valued.
        "forall x, y. exists z. Add(x,y,z)",
        "forall x, y, z, w. (Add(x,y,z) & Add(x,y,w) -> z = w)",
        "forall x, y. exists z. Mul(x,y,z)",
        "forall x, y, z, w. (Mul(x,y,z) & Mul(x,y,w) -> z = w)",
        "exists x. Zero(x)",
        "forall x, y. (Zero(x) & Zero(y) -> x = y)",
        "exists x. One(x)",
        "forall x, y. (One(x) & One(y) -> x = y)",
        // Additive group.
        "forall x, y, z, a, b, c. (Add(x,y,a) & Add(a,z,b) & Add(y,z,c) -> Add(x,c,b))",
        "forall x, y, z. (Add(x,y,z) -> Add(y,x,z))",
        "forall e, x. (Zero(e) -> Add(x,e,x))",
        "forall e, x. (Zero(e) -> exists y. Add(x,y,e))",
        // Multiplicative group on the nonzero elements.
        "forall x, y, z, a, b, c. (Mul(x,y,a) & Mul(a,z,b) & Mul(y,z,c) -> Mul(x,c,b))",
        "forall x, y, z. (Mul(x,y,z) -> Mul(y,x,z))",
        "forall o, x. (One(o) -> Mul(x,o,x))",
        "forall e, o, x. (Zero(e) & One(o) & x != e -> exists y. Mul(x,y,o))",
        "forall e, o. (Zero(e) & One(o) -> e != o)",
        // Distributivity.
        "forall x, y, z, s, p, q, r. (Add(y,z,s) & Mul(x,s,p) & Mul(x,y,q) & Mul(x,z,r) -> Add(q,r,p))",
    ]);
    for (name, k) in [("Add", 2), ("Mul", 2), ("Zero", 0), ("One", 0)] {
        t.add_functional(name, k).expect("field hint");
    }
    t
}

/// R is the graph of a total injective function that is not surjective.
/// Such a relation exists only on an infinite domain.
pub fn dedekind() -> Formula {
    f("(forall x. exists y. R(x,y)) \
       & (forall x, y, z. (R(x,y) & R(x,z) -> y = z)) \
       & (forall x, y, z. (R(x,z) & R(y,z) -> x = y)) \
       & (exists y. forall x. ~R(x,y))")
}

/// There are at least `n` elements.
pub fn at_least(n: usize) -> Formula {
    let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let mut distinct = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            distinct.push(Formula::eq(&vars[i], &vars[j]).not());
        }
    }
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    Formula::exists_many(&names, Formula::conjunction(distinct))
}

/// The first `k` instances of the "at least n elements" schema.
pub fn at_least_schema(k: usize) -> Theory {
    Theory::from_sentences((1..=k).map(at_least)).expect("schema theory")
}

/// Every element equals every other.
pub fn at_most_one() -> Formula {
    f("forall x, y. x = y")
}

pub fn symmetric_irreflexive() -> Vec<Formula> {
    vec![f("forall x, y. (E(x,y) -> E(y,x))"), f("forall x. ~E(x,x)")]
}

/// Triangle-free simple graphs.
pub fn triangle_free_graphs() -> Theory {
    let mut s = symmetric_irreflexive();
    s.push(f("forall x, y, z. ~(E(x,y) & E(y,z) & E(z,x))"));
    Theory::from_sentences(s).expect("graph theory")
}

/// No closed walk of odd length `len`.
pub fn no_odd_closed_walk(len: usize) -> Formula {
    let vars: Vec<String> = (0..len).map(|i| format!("x{i}")).collect();
    let edges = (0..len).map(|i| Formula::atom("E", &[&vars[i], &vars[(i + 1) % len]]));
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    Formula::forall_many(&names, Formula::conjunction(edges).not())
}

/// Simple graphs without closed walks of odd length up to `max_len`.
pub fn odd_cycle_free_graphs(max_len: usize) -> Theory {
    let mut s = symmetric_irreflexive();
    s.extend((3..=max_len).step_by(2).map(no_odd_closed_walk));
    Theory::from_sentences(s).expect("graph theory")
}

/// B and W form a proper two-colouring of E.
pub fn two_coloring() -> Formula {
    f("(forall x. (B(x) | W(x))) \
       & (forall x, y. (E(x,y) -> ~(B(x) & B(y)) & ~(W(x) & W(y))))")
}

/// At most one element, and R holds somewhere.
pub fn singleton_with_relation() -> Theory {
    Theory::from_sentences([at_most_one(), f("exists x, y. R(x,y)")]).expect("theory")
}

/// At most one element, and R fails somewhere.
pub fn singleton_with_complement() -> Theory {
    Theory::from_sentences([at_most_one(), f("exists x, y. ~R(x,y)")]).expect("theory")
}

/// P holds exactly at elements with an outgoing edge.
pub fn defined_by_edges() -> Theory {
    theory(&["forall x. (P(x) <-> exists y. E(x,y))"])
}
