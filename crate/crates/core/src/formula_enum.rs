//! Seeded random formulas and instances over small vocabularies.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Formula, Signature, Theory};

/// Deterministic generator for a given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A propositional formula over `vars` with at most `depth` connective
/// levels.
pub fn random_prop<R: Rng>(rng: &mut R, vars: &[&str], depth: usize) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return match rng.gen_range(0..12) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::prop(*vars.choose(rng).expect("variables")),
        };
    }
    let a = random_prop(rng, vars, depth - 1);
    match rng.gen_range(0..5) {
        0 => a.not(),
        1 => a.and(random_prop(rng, vars, depth - 1)),
        2 => a.or(random_prop(rng, vars, depth - 1)),
        3 => a.implies(random_prop(rng, vars, depth - 1)),
        _ => a.iff(random_prop(rng, vars, depth - 1)),
    }
}

/// Up to `max_len` random formulas over `vars`, as a theory.
pub fn random_prop_theory<R: Rng>(rng: &mut R, vars: &[&str], max_len: usize, depth: usize) -> Theory {
    let len = rng.gen_range(0..=max_len);
    Theory::from_sentences((0..len).map(|_| random_prop(rng, vars, depth))).expect("propositional theory")
}

/// Names `v0, v1, ...`.
pub fn prop_vars(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|i| format!("{prefix}{i}")).collect()
}

fn random_atom<R: Rng>(rng: &mut R, sig: &Signature, vars: &[&str]) -> Formula {
    let symbols: Vec<(&str, usize)> = sig.symbols().collect();
    let eq = sig.equality_enabled() && vars.len() >= 2;
    if symbols.is_empty() || (eq && rng.gen_ratio(1, 5)) {
        if !eq {
            return if rng.gen() { Formula::True } else { Formula::False };
        }
        return Formula::eq(vars.choose(rng).unwrap(), vars.choose(rng).unwrap());
    }
    let &(name, k) = symbols.choose(rng).unwrap();
    let args: Vec<&str> = (0..k).map(|_| *vars.choose(rng).unwrap()).collect();
    Formula::atom(name, &args)
}

/// A formula over `sig` whose variables come from `vars`, with at most
/// `depth` levels of connectives and quantifiers.
pub fn random_formula<R: Rng>(rng: &mut R, sig: &Signature, vars: &[&str], depth: usize) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 5) {
        return random_atom(rng, sig, vars);
    }
    let sub = |rng: &mut R| random_formula(rng, sig, vars, depth - 1);
    match rng.gen_range(0..7) {
        0 => sub(rng).not(),
        1 => sub(rng).and(sub(rng)),
        2 => sub(rng).or(sub(rng)),
        3 => sub(rng).implies(sub(rng)),
        4 => sub(rng).iff(sub(rng)),
        5 => Formula::exists(vars.choose(rng).unwrap(), sub(rng)),
        _ => Formula::forall(vars.choose(rng).unwrap(), sub(rng)),
    }
}

/// Binds every free variable of `f` with a random quantifier.
pub fn close<R: Rng>(rng: &mut R, f: Formula) -> Formula {
    let free: Vec<String> = f.free_vars().into_iter().collect();
    free.iter().rev().fold(f, |body, v| {
        if rng.gen() {
            Formula::exists(v, body)
        } else {
            Formula::forall(v, body)
        }
    })
}

/// A sentence over `sig` using the variables `x`, `y`.
pub fn random_sentence<R: Rng>(rng: &mut R, sig: &Signature, depth: usize) -> Formula {
    let f = random_formula(rng, sig, &["x", "y"], depth);
    close(rng, f)
}

/// A sentence built from equality alone with quantifier rank at most
/// `rank`.
pub fn random_pure_equality<R: Rng>(rng: &mut R, rank: usize) -> Formula {
    let names: Vec<String> = (1..=rank.max(1)).map(|i| format!("x{i}")).collect();
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    fn build<R: Rng>(rng: &mut R, vars: &[&str], bound: usize, rank: usize, depth: usize) -> Formula {
        let can_quantify = bound < vars.len() && rank > 0;
        let choice = if depth == 0 { 0 } else { rng.gen_range(0..6) };
        match choice {
            4 | 5 if can_quantify => {
                let v = vars[bound];
                let body = build(rng, vars, bound + 1, rank - 1, depth.saturating_sub(1));
                if choice == 4 {
                    Formula::exists(v, body)
                } else {
                    Formula::forall(v, body)
                }
            }
            1 => build(rng, vars, bound, rank, depth - 1).not(),
            2 => build(rng, vars, bound, rank, depth - 1).and(build(rng, vars, bound, rank, depth - 1)),
            3 => build(rng, vars, bound, rank, depth - 1).or(build(rng, vars, bound, rank, depth - 1)),
            _ if bound >= 2 => {
                let i = rng.gen_range(0..bound);
                let j = rng.gen_range(0..bound);
                Formula::eq(vars[i], vars[j])
            }
            _ if can_quantify => {
                let body = build(rng, vars, bound + 1, rank - 1, depth);
                Formula::exists(vars[bound], body)
            }
            _ => {
                if rng.gen() {
                    Formula::True
                } else {
                    Formula::False
                }
            }
        }
    }
    let f = build(rng, &vars, 0, rank, 2 * rank + 2);
    close(rng, f)
}

/// Signature with the given unary and binary symbols, equality on.
pub fn small_signature(unary: &[&str], binary: &[&str]) -> Signature {
    Signature::from_symbols(unary.iter().map(|n| (*n, 1)).chain(binary.iter().map(|n| (*n, 2))))
        .expect("distinct symbols")
}

/// A random theory of up to `max_len` sentences over `sig`; the theory's
/// signature is `sig` whatever the sentences mention.
pub fn random_theory<R: Rng>(rng: &mut R, sig: &Signature, max_len: usize, depth: usize) -> Theory {
    let len = rng.gen_range(0..=max_len);
    let mut t = Theory::over(sig.clone());
    for _ in 0..len {
        t.push(random_sentence(rng, sig, depth))
            .expect("sentence over signature");
    }
    t
}
