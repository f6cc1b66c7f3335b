//! Reference implementations used as oracles by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeSet, HashMap, VecDeque};

use folfriend::{eval_sentence, FiniteStructure, Formula, Signature};
use itertools::Itertools;

/// Atomic type of a tuple: truth of every atom over its positions.
fn atomic_type(s: &FiniteStructure, tuple: &[usize], equality: bool) -> Vec<bool> {
    let m = tuple.len();
    let mut out = Vec::new();
    if equality {
        for i in 0..m {
            for j in i + 1..m {
                out.push(tuple[i] == tuple[j]);
            }
        }
    }
    for (name, k) in s.signature().symbols() {
        if k == 0 {
            out.push(s.holds(name, &[]));
            continue;
        }
        for idx in itertools::repeat_n(0..m, k).multi_cartesian_product() {
            let t: Vec<usize> = idx.iter().map(|&i| tuple[i]).collect();
            out.push(s.holds(name, &t));
        }
    }
    out
}

/// Interned rank-`r` types over one or more structures. Two tuples get the
/// same id exactly when they satisfy the same formulas of quantifier rank
/// at most `r`: the rank-0 class is fixed by the atoms, and a rank-r class
/// by the rank-0 class together with the set of rank-(r-1) classes its
/// one-point extensions realize.
pub struct Types {
    equality: bool,
    ids: HashMap<(Vec<bool>, BTreeSet<usize>), usize>,
}

impl Types {
    pub fn new(equality: bool) -> Self {
        Types {
            equality,
            ids: HashMap::new(),
        }
    }

    pub fn of(&mut self, s: &FiniteStructure, tuple: &mut Vec<usize>, rank: usize) -> usize {
        let atoms = atomic_type(s, tuple, self.equality);
        let mut ext = BTreeSet::new();
        if rank > 0 {
            for e in 0..s.size() {
                tuple.push(e);
                ext.insert(self.of(s, tuple, rank - 1));
                tuple.pop();
            }
            // Rank is encoded by the marker so ranks never share ids.
            ext.insert(usize::MAX - rank);
        }
        let next = self.ids.len();
        *self.ids.entry((atoms, ext)).or_insert(next)
    }
}

/// Agreement of two structures on every sentence of rank at most `k`.
pub fn agree_up_to_rank(a: &FiniteStructure, b: &FiniteStructure, k: usize, equality: bool) -> bool {
    let mut t = Types::new(equality);
    t.of(a, &mut Vec::new(), k) == t.of(b, &mut Vec::new(), k)
}

/// Closed form for bare sets.
pub fn bare_sets_equivalent(m: usize, n: usize, k: usize) -> bool {
    m == n || m.min(n) >= k
}

/// Breadth-first two-colouring of the symmetric closure of `E`.
pub fn bipartite(g: &FiniteStructure) -> bool {
    let n = g.size();
    let mut colour: Vec<Option<bool>> = vec![None; n];
    for start in 0..n {
        if colour[start].is_some() {
            continue;
        }
        colour[start] = Some(false);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let cu = colour[u].unwrap();
            for v in 0..n {
                if !(g.holds("E", &[u, v]) || g.holds("E", &[v, u])) {
                    continue;
                }
                match colour[v] {
                    None => {
                        colour[v] = Some(!cu);
                        queue.push_back(v);
                    }
                    Some(cv) if cv == cu => return false,
                    _ => {}
                }
            }
        }
    }
    true
}

/// Every structure over `sig` with `n` elements, by brute force.
pub fn all_structures(sig: &Signature, n: usize) -> Vec<FiniteStructure> {
    let cells: Vec<(String, Vec<usize>)> = sig
        .symbols()
        .flat_map(|(name, k)| {
            itertools::repeat_n(0..n, k)
                .multi_cartesian_product()
                .map(move |t| (name.to_string(), t))
        })
        .collect();
    assert!(cells.len() <= 20, "too many cells for brute force");
    (0..1u64 << cells.len())
        .map(|mask| {
            let mut s = FiniteStructure::new(sig.clone(), n).unwrap();
            for (i, (name, t)) in cells.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    s.insert(name, t).unwrap();
                }
            }
            s
        })
        .collect()
}

/// Least encoding over all relabelings; equal exactly for isomorphic
/// structures.
pub fn brute_canonical(s: &FiniteStructure) -> Vec<Vec<Vec<usize>>> {
    let names: Vec<String> = s.signature().names().map(str::to_string).collect();
    (0..s.size())
        .permutations(s.size())
        .map(|p| {
            names
                .iter()
                .map(|name| {
                    let mut ts: Vec<Vec<usize>> = s.tuples(name).map(|t| t.iter().map(|&e| p[e]).collect()).collect();
                    ts.sort();
                    ts
                })
                .collect::<Vec<_>>()
        })
        .min()
        .unwrap()
}

/// Models of `sentences` with `n` elements, counted up to isomorphism by
/// brute force.
pub fn brute_model_classes(sig: &Signature, sentences: &[Formula], n: usize) -> usize {
    all_structures(sig, n)
        .into_iter()
        .filter(|s| sentences.iter().all(|f| eval_sentence(s, f).unwrap()))
        .map(|s| brute_canonical(&s))
        .collect::<BTreeSet<_>>()
        .len()
}

/// Whether some `n`-element structure over `sig` satisfies all sentences.
pub fn brute_has_model(sig: &Signature, sentences: &[Formula], n: usize) -> bool {
    all_structures(sig, n)
        .iter()
        .any(|s| sentences.iter().all(|f| eval_sentence(s, f).unwrap()))
}

/// Whether some function on `n` points is injective and not surjective,
/// checked over all `n^n` functions.
pub fn dedekind_function_exists(n: usize) -> bool {
    itertools::repeat_n(0..n, n).multi_cartesian_product().any(|f| {
        let injective = (0..n).all(|i| (0..i).all(|j| f[i] != f[j]));
        let missed = (0..n).any(|y| !f.contains(&y));
        injective && missed
    })
}

/// Whether some relation on `n` points satisfies `phi`, over all `2^(n*n)`
/// binary tables for `R`.
pub fn brute_dedekind_tables(phi: &Formula, n: usize) -> bool {
    let sig = Signature::from_symbols([("R", 2)]).unwrap();
    brute_has_model(&sig, std::slice::from_ref(phi), n)
}

/// The field of integers modulo `p`, with operation graphs as relations.
pub fn integers_mod(p: usize) -> FiniteStructure {
    let mut sig = Signature::from_symbols([("Add", 3), ("Mul", 3), ("One", 1), ("Zero", 1)]).unwrap();
    sig.add_functional("Add", 2).unwrap();
    sig.add_functional("Mul", 2).unwrap();
    sig.add_functional("Zero", 0).unwrap();
    sig.add_functional("One", 0).unwrap();
    let mut s = FiniteStructure::new(sig, p).unwrap();
    for x in 0..p {
        for y in 0..p {
            s.insert("Add", &[x, y, (x + y) % p]).unwrap();
            s.insert("Mul", &[x, y, (x * y) % p]).unwrap();
        }
    }
    s.insert("Zero", &[0]).unwrap();
    s.insert("One", &[1 % p]).unwrap();
    s
}

#[allow(unused_imports)]
pub use folfriend::suites;
pub mod strategies;
