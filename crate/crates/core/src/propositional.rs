//! Exact friendliness for sentences built from 0-ary atoms.
//!
//! Three independent procedures decide the same relation: direct
//! extension of valuations, refinement over the shared vocabulary, and
//! consistency with the complete theory of every model of the premises.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::par::{self, Schedule};
use crate::syntax::{Formula, Theory};

/// Hard limit on the number of propositional variables in one query.
pub const MAX_VARS: usize = 20;
/// Limit on shared variables for the refinement procedure.
pub const MAX_SHARED: usize = 4;

/// A valuation of an ordered list of variables; bit `i` is variable `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PropValuation {
    pub bits: u32,
    pub width: usize,
}

impl PropValuation {
    pub fn get(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    /// Every valuation of `width` variables, in counting order.
    pub fn all(width: usize) -> impl Iterator<Item = PropValuation> {
        (0..1u32 << width).map(move |bits| PropValuation { bits, width })
    }

    /// Named view, for reports.
    pub fn named(&self, vars: &[String]) -> BTreeMap<String, bool> {
        vars.iter().enumerate().map(|(i, v)| (v.clone(), self.get(i))).collect()
    }
}

fn check_propositional(f: &Formula) -> Result<()> {
    match f {
        Formula::Atom(name, args) if !args.is_empty() => {
            Err(Error::NotPropositional(format!("{name} has arity {}", args.len())))
        }
        Formula::Equals(..) => Err(Error::NotPropositional("equality".to_string())),
        Formula::ForAll(..) | Formula::Exists(..) => Err(Error::NotPropositional("quantifier".to_string())),
        other => other.children().into_iter().try_for_each(check_propositional),
    }
}

fn vars_of<'a, I: IntoIterator<Item = &'a Formula>>(fs: I) -> BTreeSet<String> {
    fs.into_iter().flat_map(Formula::relation_names).collect()
}

/// Truth of a propositional formula; `index` gives each variable's bit.
fn holds(f: &Formula, index: &BTreeMap<&str, usize>, bits: u32) -> bool {
    match f {
        Formula::Atom(name, _) => bits >> index[name.as_str()] & 1 == 1,
        Formula::True => true,
        Formula::False => false,
        Formula::Not(a) => !holds(a, index, bits),
        Formula::And(a, b) => holds(a, index, bits) && holds(b, index, bits),
        Formula::Or(a, b) => holds(a, index, bits) || holds(b, index, bits),
        Formula::Implies(a, b) => !holds(a, index, bits) || holds(b, index, bits),
        Formula::Iff(a, b) => holds(a, index, bits) == holds(b, index, bits),
        Formula::Equals(..) | Formula::ForAll(..) | Formula::Exists(..) => {
            unreachable!("checked propositional")
        }
    }
}

/// Variables of Γ, variables of φ outside Γ, after validation.
struct Problem<'a> {
    gamma: &'a [Formula],
    phi: &'a Formula,
    vg: Vec<String>,
    vx: Vec<String>,
}

impl<'a> Problem<'a> {
    fn new(gamma: &'a Theory, phi: &'a Formula) -> Result<Problem<'a>> {
        for f in gamma.sentences().iter().chain([phi]) {
            check_propositional(f)?;
        }
        let mut vg = vars_of(gamma.sentences());
        // Symbols declared in Γ's signature count even if unused.
        for (name, arity) in gamma.signature().symbols() {
            if arity != 0 {
                return Err(Error::NotPropositional(format!("{name} has arity {arity}")));
            }
            vg.insert(name.to_string());
        }
        let vx: Vec<String> = vars_of([phi]).difference(&vg).cloned().collect();
        let count = vg.len() + vx.len();
        if count > MAX_VARS {
            return Err(Error::TooManyVariables { count, cap: MAX_VARS });
        }
        Ok(Problem {
            gamma: gamma.sentences(),
            phi,
            vg: vg.into_iter().collect(),
            vx,
        })
    }

    /// Variables of Γ first, then the extra ones of φ.
    fn index(&self) -> BTreeMap<&str, usize> {
        self.vg
            .iter()
            .chain(&self.vx)
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect()
    }
}

/// A valuation of Γ's variables that satisfies Γ but has no extension
/// satisfying φ; `None` when Γ is friendly to φ.
pub fn prop_counter_valuation(gamma: &Theory, phi: &Formula) -> Result<Option<BTreeMap<String, bool>>> {
    let p = Problem::new(gamma, phi)?;
    let index = p.index();
    let g = p.vg.len();
    let x = p.vx.len();
    let outer: Vec<u32> = (0..1u32 << g).collect();
    let schedule = if g >= 12 {
        Schedule::Parallel
    } else {
        Schedule::Sequential
    };
    let bad = par::find_first(schedule, &outer, |&v| {
        let sat_gamma = p.gamma.iter().all(|s| holds(s, &index, v));
        let extends = || (0..1u32 << x).any(|w| holds(p.phi, &index, v | (w << g)));
        (sat_gamma && !extends()).then_some(v)
    });
    Ok(bad.map(|(_, v)| PropValuation { bits: v, width: g }.named(&p.vg)))
}

/// Γ friendly to φ: every valuation satisfying Γ extends, on φ's extra
/// variables, to one satisfying φ.
pub fn prop_friendly(gamma: &Theory, phi: &Formula) -> Result<bool> {
    Ok(prop_counter_valuation(gamma, phi)?.is_none())
}

/// Friendliness via refinement: every boolean function ψ of the shared
/// variables implied by φ is implied by Γ.
pub fn prop_friendly_via_refinement(gamma: &Theory, phi: &Formula) -> Result<bool> {
    let p = Problem::new(gamma, phi)?;
    let phi_vars = vars_of([phi]);
    let shared: Vec<&String> = p.vg.iter().filter(|v| phi_vars.contains(*v)).collect();
    let k = shared.len();
    if k > MAX_SHARED {
        return Err(Error::TooManySharedVariables {
            count: k,
            cap: MAX_SHARED,
        });
    }
    let index = p.index();
    let g = p.vg.len();
    let x = p.vx.len();
    let shared_bits: Vec<usize> = shared.iter().map(|v| index[v.as_str()]).collect();
    let project = |bits: u32| {
        shared_bits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &b)| acc | ((bits as usize >> b & 1) << i))
    };
    // Shared-variable points reached by models of φ and of Γ.
    let mut phi_points = 0u64;
    for bits in 0..1u32 << (g + x) {
        if holds(phi, &index, bits) {
            phi_points |= 1 << project(bits);
        }
    }
    let mut gamma_points = 0u64;
    for bits in 0..1u32 << g {
        if p.gamma.iter().all(|s| holds(s, &index, bits)) {
            gamma_points |= 1 << project(bits);
        }
    }
    // ψ ranges over all truth tables on 2^k points.
    let tables: u64 = 1 << (1u32 << k);
    Ok((0..tables).all(|psi| {
        let phi_entails = phi_points & !psi == 0;
        let gamma_entails = gamma_points & !psi == 0;
        !phi_entails || gamma_entails
    }))
}

/// Satisfiability of a finite set of propositional formulas.
pub fn prop_satisfiable(fs: &[Formula]) -> Result<bool> {
    for f in fs {
        check_propositional(f)?;
    }
    let vars: Vec<String> = vars_of(fs).into_iter().collect();
    if vars.len() > MAX_VARS {
        return Err(Error::TooManyVariables {
            count: vars.len(),
            cap: MAX_VARS,
        });
    }
    let index: BTreeMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    Ok((0..1u32 << vars.len()).any(|bits| fs.iter().all(|f| holds(f, &index, bits))))
}

/// Classical consequence by truth tables.
pub fn prop_entails(gamma: &Theory, phi: &Formula) -> Result<bool> {
    let mut fs = gamma.sentences().to_vec();
    fs.push(phi.clone().not());
    Ok(!prop_satisfiable(&fs)?)
}

/// Friendliness as consistency: for every complete theory Δ over Γ's
/// variables that is consistent with Γ, Δ ∪ {φ} is satisfiable.
pub fn prop_consistency_characterization(gamma: &Theory, phi: &Formula) -> Result<bool> {
    let p = Problem::new(gamma, phi)?;
    let g = p.vg.len();
    for v in PropValuation::all(g) {
        let delta: Vec<Formula> =
            p.vg.iter()
                .enumerate()
                .map(|(i, name)| {
                    let atom = Formula::prop(name.as_str());
                    if v.get(i) {
                        atom
                    } else {
                        atom.not()
                    }
                })
                .collect();
        let mut with_gamma = delta.clone();
        with_gamma.extend(p.gamma.iter().cloned());
        if !prop_satisfiable(&with_gamma)? {
            continue;
        }
        let mut with_phi = delta;
        with_phi.push(phi.clone());
        if !prop_satisfiable(&with_phi)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s, true).unwrap()
    }

    fn g(lines: &[&str]) -> Theory {
        Theory::from_sentences(lines.iter().map(|l| p(l))).unwrap()
    }

    fn all_three(gamma: &Theory, phi: &Formula) -> bool {
        let a = prop_friendly(gamma, phi).unwrap();
        assert_eq!(a, prop_friendly_via_refinement(gamma, phi).unwrap());
        assert_eq!(a, prop_consistency_characterization(gamma, phi).unwrap());
        a
    }

    #[test]
    fn examples() {
        assert!(all_three(&g(&["P"]), &p("P & Q")));
        assert!(!all_three(&g(&["P"]), &p("~P")));
        assert!(!all_three(&g(&["P | Q"]), &p("P <-> ~Q")));
        assert!(!all_three(&g(&["P | Q"]), &p("~P & ~Q")));
        assert!(all_three(&g(&[]), &p("Q")));
        assert!(all_three(&g(&["P"]), &p("Q")));
    }

    #[test]
    fn counter_valuation_is_reported() {
        let c = prop_counter_valuation(&g(&["P | Q"]), &p("P <-> ~Q")).unwrap().unwrap();
        assert_eq!(c, BTreeMap::from([("P".to_string(), true), ("Q".to_string(), true)]));
    }

    #[test]
    fn rejects_first_order_input() {
        assert!(matches!(
            prop_friendly(&g(&["exists x. P(x)"]), &p("Q")),
            Err(Error::NotPropositional(_))
        ));
        let wide: Vec<String> = (0..5).map(|i| format!("A{i}")).collect();
        let conj = wide.join(" & ");
        assert!(matches!(
            prop_friendly_via_refinement(&g(&[&conj]), &p(&conj)),
            Err(Error::TooManySharedVariables { count: 5, cap: 4 })
        ));
    }

    #[test]
    fn entailment() {
        assert!(prop_entails(&g(&["P", "P -> Q"]), &p("Q")).unwrap());
        assert!(!prop_entails(&g(&["P | Q"]), &p("Q")).unwrap());
    }
}
