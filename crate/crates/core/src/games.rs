//! Ehrenfeucht–Fraïssé games between finite structures.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::parser::pretty_print;
use crate::semantics::eval_sentence;
use crate::structure::FiniteStructure;
use crate::syntax::Formula;

type Position = (Vec<u16>, Vec<u16>);

struct Game<'a> {
    a: &'a FiniteStructure,
    b: &'a FiniteStructure,
    equality: bool,
    rels: Vec<(String, usize)>,
    memo: HashMap<Position, bool>,
}

fn var(i: usize) -> String {
    format!("x{}", i + 1)
}

impl<'a> Game<'a> {
    fn new(a: &'a FiniteStructure, b: &'a FiniteStructure) -> Result<Self> {
        if !a.signature().same_symbols(b.signature()) {
            return Err(Error::SignatureMismatch);
        }
        Ok(Game {
            a,
            b,
            equality: a.signature().equality_enabled() && b.signature().equality_enabled(),
            rels: a.signature().symbols().map(|(n, k)| (n.to_string(), k)).collect(),
            memo: HashMap::new(),
        })
    }

    /// An atomic formula over `x1..` that tells the extended sequences
    /// apart, given that they agreed before the last element was added.
    /// The returned literal is true in `left`.
    fn atomic_difference(
        &self,
        left: &FiniteStructure,
        right: &FiniteStructure,
        ls: &[u16],
        rs: &[u16],
    ) -> Option<Formula> {
        let m = ls.len();
        let last = m.checked_sub(1);
        let literal = |atom: Formula, holds: bool| if holds { atom } else { atom.not() };
        if self.equality {
            if let Some(j) = last {
                for i in 0..j {
                    let el = ls[i] == ls[j];
                    if el != (rs[i] == rs[j]) {
                        return Some(literal(Formula::eq(&var(i), &var(j)), el));
                    }
                }
            }
        }
        let mut tuple_l = Vec::new();
        let mut tuple_r = Vec::new();
        for (name, k) in &self.rels {
            let k = *k;
            if k == 0 {
                if last.is_none() && left.holds(name, &[]) != right.holds(name, &[]) {
                    return Some(literal(Formula::prop(name.as_str()), left.holds(name, &[])));
                }
                continue;
            }
            let Some(j) = last else { continue };
            for idx in itertools::repeat_n(0..m, k).multi_cartesian_product() {
                if !idx.contains(&j) {
                    continue;
                }
                tuple_l.clear();
                tuple_r.clear();
                tuple_l.extend(idx.iter().map(|&i| ls[i] as usize));
                tuple_r.extend(idx.iter().map(|&i| rs[i] as usize));
                let hl = left.holds(name, &tuple_l);
                if hl != right.holds(name, &tuple_r) {
                    let vars: Vec<String> = idx.iter().map(|&i| var(i)).collect();
                    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
                    return Some(literal(Formula::atom(name.as_str(), &names), hl));
                }
            }
        }
        None
    }

    fn extends(&self, sa: &[u16], sb: &[u16]) -> bool {
        self.atomic_difference(self.a, self.b, sa, sb).is_none()
    }

    /// Duplicator wins `rounds` more rounds from a partial isomorphism.
    fn duplicator_wins(&mut self, sa: &mut Vec<u16>, sb: &mut Vec<u16>, rounds: usize) -> bool {
        if rounds == 0 {
            return true;
        }
        let key = (sa.clone(), sb.clone());
        if let Some(&w) = self.memo.get(&key) {
            return w;
        }
        let won = self.answers_all(sa, sb, rounds, true) && self.answers_all(sa, sb, rounds, false);
        self.memo.insert(key, won);
        won
    }

    /// Duplicator has an answer to every Spoiler move on one side.
    fn answers_all(&mut self, sa: &mut Vec<u16>, sb: &mut Vec<u16>, rounds: usize, in_a: bool) -> bool {
        let (na, nb) = (self.a.size() as u16, self.b.size() as u16);
        let (own, other) = if in_a { (na, nb) } else { (nb, na) };
        for e in 0..own {
            // Repeating a chosen element is answered by its partner and
            // leaves the position unchanged.
            if (if in_a { &*sa } else { &*sb }).contains(&e) {
                continue;
            }
            let mut answered = false;
            for f in 0..other {
                let (x, y) = if in_a { (e, f) } else { (f, e) };
                sa.push(x);
                sb.push(y);
                let ok = self.extends(sa, sb) && self.duplicator_wins(sa, sb, rounds - 1);
                sa.pop();
                sb.pop();
                if ok {
                    answered = true;
                    break;
                }
            }
            if !answered {
                return false;
            }
        }
        true
    }

    /// A formula of quantifier rank at most `rounds` over `x1..` true at
    /// `sa` in A and false at `sb` in B when `a_left`, roles swapped
    /// otherwise. Requires Spoiler to win from the position.
    fn separate(&mut self, sa: &mut Vec<u16>, sb: &mut Vec<u16>, rounds: usize, a_left: bool) -> Formula {
        let m = sa.len();
        let (na, nb) = (self.a.size() as u16, self.b.size() as u16);
        for in_a in [true, false] {
            let (own, other) = if in_a { (na, nb) } else { (nb, na) };
            for e in 0..own {
                if (if in_a { &*sa } else { &*sb }).contains(&e) {
                    continue;
                }
                let wins = (0..other).all(|f| {
                    let (x, y) = if in_a { (e, f) } else { (f, e) };
                    sa.push(x);
                    sb.push(y);
                    let dup = self.extends(sa, sb) && self.duplicator_wins(sa, sb, rounds - 1);
                    sa.pop();
                    sb.pop();
                    !dup
                });
                if !wins {
                    continue;
                }
                // Spoiler's move is in the structure on the left exactly
                // when `in_a == a_left`; the conjuncts must then hold at the
                // move and each fail at some answer.
                let spoiler_left = in_a == a_left;
                let mut parts: BTreeMap<String, Formula> = BTreeMap::new();
                for f in 0..other {
                    let (x, y) = if in_a { (e, f) } else { (f, e) };
                    sa.push(x);
                    sb.push(y);
                    let part = match self.atomic_difference(self.a, self.b, sa, sb) {
                        // True in A; flip when it must hold on B's side.
                        Some(lit) => {
                            if in_a {
                                lit
                            } else {
                                flip(lit)
                            }
                        }
                        None => self.separate(sa, sb, rounds - 1, in_a),
                    };
                    sa.pop();
                    sb.pop();
                    parts.insert(pretty_print(&part), part);
                }
                let body = Formula::conjunction(parts.into_values());
                let ex = Formula::exists(&var(m), body);
                return if spoiler_left { ex } else { ex.not() };
            }
        }
        unreachable!("Spoiler has a winning move")
    }
}

/// Negates a literal without stacking negations.
fn flip(lit: Formula) -> Formula {
    match lit {
        Formula::Not(inner) => *inner,
        other => other.not(),
    }
}

/// Whether Duplicator wins the `k`-round game on `a` and `b`.
pub fn ef_equivalent(a: &FiniteStructure, b: &FiniteStructure, k: usize) -> Result<bool> {
    let mut g = Game::new(a, b)?;
    if !g.extends(&[], &[]) {
        return Ok(false);
    }
    Ok(g.duplicator_wins(&mut Vec::new(), &mut Vec::new(), k))
}

/// A sentence of quantifier rank at most `k` true in `a` and false in `b`,
/// or `None` when the two are `k`-equivalent.
pub fn distinguishing_sentence(a: &FiniteStructure, b: &FiniteStructure, k: usize) -> Result<Option<Formula>> {
    let mut g = Game::new(a, b)?;
    let psi = if let Some(lit) = g.atomic_difference(a, b, &[], &[]) {
        lit
    } else if g.duplicator_wins(&mut Vec::new(), &mut Vec::new(), k) {
        return Ok(None);
    } else {
        g.separate(&mut Vec::new(), &mut Vec::new(), k, true)
    };
    if psi.quantifier_rank() > k || !eval_sentence(a, &psi)? || eval_sentence(b, &psi)? {
        return Err(Error::InvalidConfig(format!(
            "separating sentence failed re-check: {}",
            pretty_print(&psi)
        )));
    }
    Ok(Some(psi))
}
