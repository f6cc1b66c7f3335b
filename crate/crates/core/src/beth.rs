//! Implicit and explicit definability of a relation symbol, checked over
//! finite structures up to a size bound.

use std::collections::HashSet;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::semantics::{
    entails_bounded_with, enumerate_models_over, search_models, BoundedEntailmentVerdict, SearchOptions,
};
use crate::structure::FiniteStructure;
use crate::syntax::{Formula, Signature, Theory};

/// Suffix of the renamed copy of the defined symbol.
const COPY_SUFFIX: &str = "__copy";

/// Cap on generated candidate formulas per definition search.
pub const MAX_CANDIDATES: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Definability {
    /// Every L-structure up to the bound has at most one expansion for P
    /// satisfying Γ.
    Defined { bound: usize },
    /// Two expansions of `base` that satisfy Γ and differ on P.
    Counterexample {
        base: FiniteStructure,
        with_p: FiniteStructure,
        other: FiniteStructure,
    },
}

impl Definability {
    pub fn is_defined(&self) -> bool {
        matches!(self, Definability::Defined { .. })
    }
}

fn check_symbol(sig: &Signature, p_name: &str) -> Result<usize> {
    sig.arity(p_name)
        .ok_or_else(|| Error::UnknownRelation(p_name.to_string()))
}

/// Argument variables of P.
fn arg_vars(arity: usize) -> Vec<String> {
    match arity {
        1 => vec!["x".to_string()],
        k => (1..=k).map(|i| format!("x{i}")).collect(),
    }
}

fn fresh_vars(arity: usize, count: usize) -> Vec<String> {
    const NAMES: [&str; 6] = ["y", "z", "w", "u", "v", "t"];
    if arity < 2 && count <= NAMES.len() {
        NAMES[..count].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=count).map(|i| format!("y{i}")).collect()
    }
}

/// Whether Γ pins down P on every structure up to `base_bound` elements.
pub fn implicitly_defines(gamma: &Theory, p_name: &str, base_bound: usize) -> Result<Definability> {
    implicitly_defines_in(gamma.signature(), gamma, p_name, base_bound, &SearchOptions::default())
}

/// Like [`implicitly_defines`] over an explicit signature L ∪ {P}.
pub fn implicitly_defines_in(
    signature: &Signature,
    gamma: &Theory,
    p_name: &str,
    base_bound: usize,
    opts: &SearchOptions,
) -> Result<Definability> {
    let arity = check_symbol(signature, p_name)?;
    if base_bound == 0 {
        return Err(Error::EmptyDomain);
    }
    let copy = format!("{p_name}{COPY_SUFFIX}");
    let mut both = signature.clone();
    both.add_symbol(&copy, arity)?;
    if let Some(out) = signature.functional_output(p_name) {
        both.add_functional(&copy, out)?;
    }
    let xs = arg_vars(arity);
    let names: Vec<&str> = xs.iter().map(String::as_str).collect();
    let differ = Formula::exists_many(
        &names,
        Formula::atom(p_name, &names)
            .not()
            .and(Formula::atom(copy.as_str(), &names)),
    );
    let mut sentences: Vec<Formula> = gamma.sentences().to_vec();
    sentences.extend(gamma.sentences().iter().map(|s| s.rename_relation(p_name, &copy)));
    sentences.push(differ);
    let ordered = opts.ordered();
    for n in 1..=base_bound {
        let found = search_models(&both, &sentences, n, None, &ordered, Some(1))?;
        if let Some(m) = found.models.into_iter().next() {
            let with_p = m.reduct(signature)?;
            let other = rename_in_structure(&m, signature, &copy, p_name)?;
            let base = with_p.reduct(&signature.without(p_name))?;
            return Ok(Definability::Counterexample { base, with_p, other });
        }
    }
    Ok(Definability::Defined { bound: base_bound })
}

/// The reduct of `m` to `target`, reading `to` from `m`'s `from` table.
fn rename_in_structure(m: &FiniteStructure, target: &Signature, from: &str, to: &str) -> Result<FiniteStructure> {
    let mut out = m.reduct(target)?;
    for t in m.tuples(to).collect::<Vec<_>>() {
        out.set(to, &t, false)?;
    }
    for t in m.tuples(from).collect::<Vec<_>>() {
        out.set(to, &t, true)?;
    }
    Ok(out)
}

/// Truth values of a candidate at every point of the sample space.
type Fingerprint = Vec<u64>;

struct Sample {
    /// Models of Γ with their offset into the point space.
    models: Vec<(FiniteStructure, usize)>,
    pool: usize,
    points: usize,
}

impl Sample {
    fn new(models: Vec<FiniteStructure>, pool: usize) -> Result<Sample> {
        let mut offset = 0usize;
        let mut out = Vec::with_capacity(models.len());
        for m in models {
            let block = m
                .size()
                .checked_pow(pool as u32)
                .filter(|b| b.checked_add(offset).is_some_and(|t| t <= 1 << 28))
                .ok_or(Error::ResourceBudgetExceeded { limit: 1 << 28 })?;
            out.push((m, offset));
            offset += block;
        }
        Ok(Sample {
            models: out,
            pool,
            points: offset,
        })
    }

    fn words(&self) -> usize {
        self.points.div_ceil(64)
    }

    fn fingerprint(&self, mut f: impl FnMut(&FiniteStructure, &[usize]) -> bool) -> Fingerprint {
        let mut fp = vec![0u64; self.words()];
        let mut values = vec![0usize; self.pool];
        for (m, offset) in &self.models {
            let n = m.size();
            let block = n.pow(self.pool as u32);
            for local in 0..block {
                let mut r = local;
                for v in values.iter_mut() {
                    *v = r % n;
                    r /= n;
                }
                if f(m, &values) {
                    let p = offset + local;
                    fp[p / 64] |= 1 << (p % 64);
                }
            }
        }
        fp
    }

    fn not(&self, a: &Fingerprint) -> Fingerprint {
        let mut out: Fingerprint = a.iter().map(|w| !w).collect();
        let extra = self.words() * 64 - self.points;
        if extra > 0 {
            let last = out.len() - 1;
            out[last] &= u64::MAX >> extra;
        }
        out
    }

    fn quantify(&self, a: &Fingerprint, var: usize, exists: bool) -> Fingerprint {
        let get = |p: usize| a[p / 64] >> (p % 64) & 1 == 1;
        let mut out = vec![0u64; self.words()];
        for (m, offset) in &self.models {
            let n = m.size();
            let stride = n.pow(var as u32);
            let block = n.pow(self.pool as u32);
            for local in 0..block {
                if (local / stride) % n != 0 {
                    continue;
                }
                let cells = (0..n).map(|d| offset + local + d * stride);
                let v = if exists {
                    cells.clone().any(get)
                } else {
                    cells.clone().all(get)
                };
                if v {
                    for p in cells {
                        out[p / 64] |= 1 << (p % 64);
                    }
                }
            }
        }
        out
    }
}

struct Candidate {
    formula: Formula,
    fp: Fingerprint,
    /// Pool variables occurring free, as a bit mask.
    free: u32,
    level: usize,
}

/// Searches formulas ψ(x̄) of L up to `depth` for one that Γ proves
/// equivalent to P(x̄) on every model with at most `base_bound` elements.
pub fn find_explicit_definition(
    gamma: &Theory,
    p_name: &str,
    depth: usize,
    base_bound: usize,
) -> Result<Option<Formula>> {
    find_explicit_definition_in(
        gamma.signature(),
        gamma,
        p_name,
        depth,
        base_bound,
        &SearchOptions::default(),
    )
}

/// Like [`find_explicit_definition`] over an explicit signature L ∪ {P}.
///
/// Level 1 holds the atoms of L over x̄ and `depth` fresh variables,
/// together with the constants; level d applies one connective or
/// quantifier to earlier levels, using at least one formula of level d-1.
/// Candidates that agree on every point of every sampled model are tried
/// once.
pub fn find_explicit_definition_in(
    signature: &Signature,
    gamma: &Theory,
    p_name: &str,
    depth: usize,
    base_bound: usize,
    opts: &SearchOptions,
) -> Result<Option<Formula>> {
    let arity = check_symbol(signature, p_name)?;
    if base_bound == 0 {
        return Err(Error::EmptyDomain);
    }
    let xs = arg_vars(arity);
    let mut pool = xs.clone();
    pool.extend(fresh_vars(arity, depth));
    if pool.len() > 31 {
        return Err(Error::InvalidConfig("too many variables for definition search".into()));
    }
    let mut models = Vec::new();
    for n in 1..=base_bound {
        models.extend(enumerate_models_over(signature, gamma.sentences(), n, opts)?);
    }
    let sample = Sample::new(models, pool.len())?;
    let x_mask: u32 = (1u32 << arity) - 1;
    let target = sample.fingerprint(|m, v| m.holds(p_name, &v[..arity]));

    let mut theory = Theory::over(signature.clone());
    for s in gamma.sentences() {
        theory.push(s.clone())?;
    }
    let names: Vec<&str> = xs.iter().map(String::as_str).collect();
    let confirm = |psi: &Formula| -> Result<bool> {
        let claim = Formula::forall_many(&names, psi.clone().iff(Formula::atom(p_name, &names)));
        Ok(!matches!(
            entails_bounded_with(&theory, &claim, base_bound, opts)?,
            BoundedEntailmentVerdict::Refuted(_)
        ))
    };

    let mut seen: HashSet<(Fingerprint, u32)> = HashSet::new();
    let mut all: Vec<Candidate> = Vec::new();
    let mut generated = 0u64;
    // Offers a candidate; returns it when it is a confirmed definition.
    let mut offer = |c: Candidate, all: &mut Vec<Candidate>| -> Result<Option<Formula>> {
        generated += 1;
        if generated > MAX_CANDIDATES {
            return Err(Error::ResourceBudgetExceeded { limit: MAX_CANDIDATES });
        }
        if !seen.insert((c.fp.clone(), c.free)) {
            return Ok(None);
        }
        if c.free & !x_mask == 0 && c.fp == target && confirm(&c.formula)? {
            return Ok(Some(c.formula));
        }
        all.push(c);
        Ok(None)
    };

    let mut level1 = vec![
        Candidate {
            formula: Formula::True,
            fp: sample.fingerprint(|_, _| true),
            free: 0,
            level: 1,
        },
        Candidate {
            formula: Formula::False,
            fp: vec![0; sample.words()],
            free: 0,
            level: 1,
        },
    ];
    let l_sig = signature.without(p_name);
    for (rel, k) in l_sig.symbols() {
        let tuples: Vec<Vec<usize>> = if k == 0 {
            vec![Vec::new()]
        } else {
            itertools::repeat_n(0..pool.len(), k)
                .multi_cartesian_product()
                .collect()
        };
        for args in tuples {
            let vars: Vec<&str> = args.iter().map(|&i| pool[i].as_str()).collect();
            let free = args.iter().fold(0u32, |acc, &i| acc | 1 << i);
            let mut tuple = vec![0; k];
            level1.push(Candidate {
                formula: Formula::atom(rel, &vars),
                fp: sample.fingerprint(|m, v| {
                    for (t, &i) in tuple.iter_mut().zip(&args) {
                        *t = v[i];
                    }
                    m.holds(rel, &tuple)
                }),
                free,
                level: 1,
            });
        }
    }
    if signature.equality_enabled() {
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                level1.push(Candidate {
                    formula: Formula::eq(&pool[i], &pool[j]),
                    fp: sample.fingerprint(|_, v| v[i] == v[j]),
                    free: 1 << i | 1 << j,
                    level: 1,
                });
            }
        }
    }
    for c in level1 {
        if let Some(f) = offer(c, &mut all)? {
            return Ok(Some(f));
        }
    }

    for d in 2..=depth {
        let prev: Vec<usize> = (0..all.len()).filter(|&i| all[i].level == d - 1).collect();
        let mut fresh = Vec::new();
        for &i in &prev {
            let c = &all[i];
            fresh.push(Candidate {
                formula: c.formula.clone().not(),
                fp: sample.not(&c.fp),
                free: c.free,
                level: d,
            });
        }
        for &j in &prev {
            for i in 0..j {
                let (a, b) = (&all[i], &all[j]);
                fresh.push(Candidate {
                    formula: a.formula.clone().and(b.formula.clone()),
                    fp: a.fp.iter().zip(&b.fp).map(|(x, y)| x & y).collect(),
                    free: a.free | b.free,
                    level: d,
                });
                fresh.push(Candidate {
                    formula: a.formula.clone().or(b.formula.clone()),
                    fp: a.fp.iter().zip(&b.fp).map(|(x, y)| x | y).collect(),
                    free: a.free | b.free,
                    level: d,
                });
            }
        }
        for &i in &prev {
            let c = &all[i];
            for (v, name) in pool.iter().enumerate() {
                if c.free >> v & 1 == 0 {
                    continue;
                }
                for exists in [true, false] {
                    let body = c.formula.clone();
                    fresh.push(Candidate {
                        formula: if exists {
                            Formula::exists(name, body)
                        } else {
                            Formula::forall(name, body)
                        },
                        fp: sample.quantify(&c.fp, v, exists),
                        free: c.free & !(1 << v),
                        level: d,
                    });
                }
            }
        }
        for c in fresh {
            if let Some(f) = offer(c, &mut all)? {
                return Ok(Some(f));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::parser::{parse_formula, pretty_print};

    fn sig(symbols: &[(&str, usize)]) -> Signature {
        Signature::from_symbols(symbols.iter().copied()).unwrap()
    }

    #[test]
    fn forced_relation_is_defined() {
        let gamma = corpus::defined_by_edges();
        assert!(implicitly_defines(&gamma, "P", 3).unwrap().is_defined());
        let psi = find_explicit_definition(&gamma, "P", 2, 3).unwrap().unwrap();
        assert_eq!(pretty_print(&psi), "exists y. E(x,y)");
    }

    #[test]
    fn empty_theory_counterexample() {
        let s = sig(&[("E", 2), ("P", 1)]);
        let gamma = Theory::over(s.clone());
        let opts = SearchOptions::default();
        match implicitly_defines_in(&s, &gamma, "P", 1, &opts).unwrap() {
            Definability::Counterexample { base, with_p, other } => {
                assert_eq!(base.size(), 1);
                assert!(!base.signature().contains("P"));
                assert_eq!(with_p.tuple_count("P"), 0);
                assert_eq!(other.tuple_count("P"), 1);
            }
            d => panic!("unexpected {d:?}"),
        }
        assert_eq!(find_explicit_definition_in(&s, &gamma, "P", 2, 2, &opts).unwrap(), None);
    }

    #[test]
    fn counterexample_at_size_two() {
        let gamma = Theory::from_sentences([parse_formula("exists x. P(x)", true).unwrap()]).unwrap();
        match implicitly_defines(&gamma, "P", 2).unwrap() {
            Definability::Counterexample { base, .. } => assert_eq!(base.size(), 2),
            d => panic!("unexpected {d:?}"),
        }
    }

    #[test]
    fn complement_definition() {
        let gamma = Theory::from_sentences([parse_formula("forall x. (P(x) <-> ~Q(x))", true).unwrap()]).unwrap();
        let psi = find_explicit_definition(&gamma, "P", 2, 3).unwrap().unwrap();
        assert_eq!(pretty_print(&psi), "~Q(x)");
    }

    #[test]
    fn unknown_symbol() {
        let gamma = corpus::defined_by_edges();
        assert!(matches!(
            implicitly_defines(&gamma, "S", 2),
            Err(Error::UnknownRelation(_))
        ));
    }
}
