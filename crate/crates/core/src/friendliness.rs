//! Bounded checking of friendliness Γ ⊨~ φ parameterized by a base
//! relation R and an expansion relation S.
//!
//! For each model A of Γ up to a size bound, a witness is a pair (A′, A″)
//! with R(A, A′), S(A′, A″) and A″ ⊨ Γ ∪ {φ}, where A″ interprets the
//! vocabulary of Γ and φ together. A′ always occupies the initial segment
//! of A″'s domain.

use std::fmt;

use crate::error::{Error, Result};
use crate::par::{self, Schedule};
use crate::semantics::{enumerate_models_over, satisfies_all, search_models, Pins, SearchOptions};
use crate::structure::{check_r, check_s, BaseRelation, ExpansionRelation, FiniteStructure};
use crate::syntax::{Formula, Signature, Theory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FriendlinessConfig {
    pub base: BaseRelation,
    pub expansion: ExpansionRelation,
    /// Largest base model examined.
    pub base_bound: usize,
    /// Largest domain for A″. Ignored under S1, where A″ has A's domain.
    pub ext_bound: usize,
    pub equality: bool,
}

impl FriendlinessConfig {
    pub fn new(base: BaseRelation, expansion: ExpansionRelation, base_bound: usize, ext_bound: usize) -> Self {
        FriendlinessConfig {
            base,
            expansion,
            base_bound,
            ext_bound,
            equality: true,
        }
    }

    pub fn with_equality(self, equality: bool) -> Self {
        FriendlinessConfig { equality, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_bound == 0 {
            return Err(Error::InvalidConfig("base bound must be positive".into()));
        }
        if self.expansion != ExpansionRelation::S1 && self.ext_bound < self.base_bound {
            return Err(Error::InvalidConfig(format!(
                "extension bound {} is below base bound {}",
                self.ext_bound, self.base_bound
            )));
        }
        if !self.equality && matches!(self.base, BaseRelation::R3 | BaseRelation::R4) {
            return Err(Error::EqualityFreeUnsupported);
        }
        Ok(())
    }

    /// Largest A″ considered for a base model of `size` elements.
    pub fn ext_limit(&self, size: usize) -> usize {
        match self.expansion {
            ExpansionRelation::S1 => size,
            _ => self.ext_bound.max(size),
        }
    }

    /// A negative verdict under this configuration settles the unbounded
    /// question. Only S1 with equality qualifies: then the witness space of
    /// a finite base model is finite and searched completely.
    pub fn negative_is_conclusive(&self) -> bool {
        self.expansion == ExpansionRelation::S1 && self.equality
    }
}

impl fmt::Display for FriendlinessConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}) base bound {}, extension bound {}{}",
            self.base,
            self.expansion,
            self.base_bound,
            self.ext_bound,
            if self.equality { "" } else { ", without equality" }
        )
    }
}

/// A base model with its witnessing pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub base: FiniteStructure,
    pub a_prime: FiniteStructure,
    pub a_dprime: FiniteStructure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundedVerdict {
    /// Every base model up to the bound has a witness, listed per base
    /// model by size and then canonical order.
    FriendlyUpToBounds { witnesses: Vec<Witness> },
    /// `refuting_base` has no witness within the bounds.
    NotFriendlyWithinBounds {
        refuting_base: FiniteStructure,
        conclusive: bool,
    },
}

impl BoundedVerdict {
    pub fn is_friendly(&self) -> bool {
        matches!(self, BoundedVerdict::FriendlyUpToBounds { .. })
    }

    /// Only a negative verdict can be conclusive.
    pub fn is_conclusive(&self) -> bool {
        matches!(self, BoundedVerdict::NotFriendlyWithinBounds { conclusive: true, .. })
    }

    /// What the verdict does not establish, for non-conclusive verdicts.
    pub fn caveat(&self, cfg: &FriendlinessConfig) -> Option<String> {
        match self {
            BoundedVerdict::FriendlyUpToBounds { .. } => Some(format!(
                "only base models with at most {} elements were examined; larger and infinite models of the premises were not",
                cfg.base_bound
            )),
            BoundedVerdict::NotFriendlyWithinBounds { conclusive: false, .. } => Some(format!(
                "no witness with at most {} elements; a witness with a larger domain, possibly an infinite one, may still exist",
                cfg.ext_bound
            )),
            BoundedVerdict::NotFriendlyWithinBounds { conclusive: true, .. } => None,
        }
    }
}

/// Verdict plus search statistics.
#[derive(Debug, Clone)]
pub struct FriendlinessRun {
    pub verdict: BoundedVerdict,
    pub base_models: usize,
    pub nodes: u64,
}

/// Signatures of Γ and of Γ together with φ, with the configured
/// equality flag.
fn languages(gamma: &Theory, phi: &Formula, cfg: &FriendlinessConfig) -> Result<(Signature, Signature)> {
    if !cfg.equality && (phi.uses_equality() || gamma.sentences().iter().any(Formula::uses_equality)) {
        return Err(Error::EqualityNotEnabled);
    }
    if let Some(v) = phi.free_vars().into_iter().next() {
        return Err(Error::FreeVariable(v));
    }
    let l_gamma = gamma.signature().clone().with_equality(cfg.equality);
    let l_both = l_gamma.union(&phi.vocabulary()?)?.with_equality(cfg.equality);
    Ok((l_gamma, l_both))
}

/// First witness for base model `a`, searching A″ sizes upward and, at
/// each size, relation entries in a fixed order.
pub fn find_witness(
    a: &FiniteStructure,
    gamma: &Theory,
    phi: &Formula,
    cfg: &FriendlinessConfig,
) -> Result<Option<Witness>> {
    Ok(find_witness_with(a, gamma, phi, cfg, &SearchOptions::default())?.0)
}

pub fn find_witness_with(
    a: &FiniteStructure,
    gamma: &Theory,
    phi: &Formula,
    cfg: &FriendlinessConfig,
    opts: &SearchOptions,
) -> Result<(Option<Witness>, u64)> {
    cfg.validate()?;
    let (l_gamma, l_both) = languages(gamma, phi, cfg)?;
    if !a.signature().same_symbols(&l_gamma) {
        return Err(Error::SignatureMismatch);
    }
    let base = a.clone().with_equality(cfg.equality);
    // Any A′ isomorphic to A is a relabeling of it, and relabeling the
    // prefix of A″ accordingly preserves S and satisfaction, so A itself
    // stands in for A′ under every base relation.
    let a_prime = base.clone();
    let sentences: Vec<&Formula> = gamma.sentences().iter().chain([phi]).collect();
    let outside_false = cfg.expansion == ExpansionRelation::S2;
    let ordered = opts.ordered();
    let mut nodes = 0;
    for m in a.size()..=cfg.ext_limit(a.size()) {
        let pins = Pins::prefix(&a_prime, m, outside_false);
        let r = search_models(&l_both, sentences.iter().copied(), m, Some(&pins), &ordered, Some(1))?;
        nodes += r.nodes;
        if let Some(a_dprime) = r.models.into_iter().next() {
            let w = Witness {
                base,
                a_prime,
                a_dprime,
            };
            if !validate_witness(gamma, phi, cfg, &w)? {
                return Err(Error::InvalidConfig("witness failed re-validation".into()));
            }
            return Ok((Some(w), nodes));
        }
    }
    Ok((None, nodes))
}

/// Re-checks the four conditions on a witness by direct evaluation.
pub fn validate_witness(gamma: &Theory, phi: &Formula, cfg: &FriendlinessConfig, w: &Witness) -> Result<bool> {
    if !satisfies_all(&w.base, gamma.sentences())? {
        return Ok(false);
    }
    if !check_r(cfg.base, &w.base, &w.a_prime)? {
        return Ok(false);
    }
    if !check_s(cfg.expansion, &w.a_prime, &w.a_dprime)? {
        return Ok(false);
    }
    if cfg.expansion != ExpansionRelation::S1 && w.a_dprime.size() > cfg.ext_limit(w.base.size()) {
        return Ok(false);
    }
    Ok(satisfies_all(&w.a_dprime, gamma.sentences())? && satisfies_all(&w.a_dprime, [phi])?)
}

/// Checks every model of Γ with at most `cfg.base_bound` elements, one per
/// isomorphism class, for a witness.
pub fn bounded_friendly(gamma: &Theory, phi: &Formula, cfg: &FriendlinessConfig) -> Result<BoundedVerdict> {
    Ok(bounded_friendly_with(gamma, phi, cfg, &SearchOptions::default(), Schedule::default())?.verdict)
}

pub fn bounded_friendly_with(
    gamma: &Theory,
    phi: &Formula,
    cfg: &FriendlinessConfig,
    opts: &SearchOptions,
    schedule: Schedule,
) -> Result<FriendlinessRun> {
    cfg.validate()?;
    let (l_gamma, _) = languages(gamma, phi, cfg)?;
    let mut witnesses = Vec::new();
    let mut base_models = 0;
    let mut nodes = 0;
    for n in 1..=cfg.base_bound {
        let models = enumerate_models_over(&l_gamma, gamma.sentences(), n, opts)?;
        base_models += models.len();
        let found = par::try_map(schedule, &models, |a| find_witness_with(a, gamma, phi, cfg, opts))?;
        for (a, (w, k)) in models.into_iter().zip(found) {
            nodes += k;
            match w {
                Some(w) => witnesses.push(w),
                None => {
                    return Ok(FriendlinessRun {
                        verdict: BoundedVerdict::NotFriendlyWithinBounds {
                            refuting_base: a,
                            conclusive: cfg.negative_is_conclusive(),
                        },
                        base_models,
                        nodes,
                    })
                }
            }
        }
    }
    Ok(FriendlinessRun {
        verdict: BoundedVerdict::FriendlyUpToBounds { witnesses },
        base_models,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::parser::parse_formula;
    use BaseRelation::*;
    use ExpansionRelation::*;

    fn p(s: &str) -> Formula {
        parse_formula(s, true).unwrap()
    }

    fn g(lines: &[&str]) -> Theory {
        Theory::from_sentences(lines.iter().map(|l| p(l))).unwrap()
    }

    #[test]
    fn witness_adds_new_relation() {
        let gamma = g(&["exists x. P(x)"]);
        let mut a = FiniteStructure::new(gamma.signature().clone(), 2).unwrap();
        a.insert("P", &[0]).unwrap();
        let w = find_witness(&a, &gamma, &p("exists x. Q(x)"), &FriendlinessConfig::new(R1, S1, 2, 2))
            .unwrap()
            .unwrap();
        assert_eq!(w.a_dprime.size(), 2);
        assert!(w.a_dprime.holds("P", &[0]) && !w.a_dprime.holds("P", &[1]));
        assert!(w.a_dprime.tuple_count("Q") >= 1);
    }

    #[test]
    fn singleton_base_has_no_finite_witness() {
        let gamma = corpus::singleton_with_relation();
        let mut a = FiniteStructure::new(gamma.signature().clone(), 1).unwrap();
        a.insert("R", &[0, 0]).unwrap();
        let phi = corpus::dedekind();
        assert_eq!(
            find_witness(&a, &gamma, &phi, &FriendlinessConfig::new(R1, S1, 1, 1)).unwrap(),
            None
        );
        assert_eq!(
            find_witness(&a, &gamma, &phi, &FriendlinessConfig::new(R1, S3, 1, 6)).unwrap(),
            None
        );
    }

    #[test]
    fn friendly_example() {
        let v = bounded_friendly(
            &g(&["exists x. P(x)"]),
            &p("exists x. Q(x)"),
            &FriendlinessConfig::new(R1, S1, 3, 3),
        )
        .unwrap();
        assert!(v.is_friendly());
        if let BoundedVerdict::FriendlyUpToBounds { witnesses } = &v {
            // |P| ranges over 1..=n at each size n.
            assert_eq!(witnesses.len(), 1 + 2 + 3);
        }
    }

    #[test]
    fn first_reduction_case() {
        let v = bounded_friendly(&g(&["P"]), &p("~P"), &FriendlinessConfig::new(R1, S1, 1, 1)).unwrap();
        assert!(v.is_conclusive());
        let v = bounded_friendly(&g(&["P"]), &p("~P"), &FriendlinessConfig::new(R1, S3, 1, 3)).unwrap();
        assert!(!v.is_friendly() && !v.is_conclusive());
    }

    #[test]
    fn config_validation() {
        let gamma = g(&["exists x. P(x)"]);
        let phi = p("exists x. Q(x)");
        assert!(bounded_friendly(&gamma, &phi, &FriendlinessConfig::new(R1, S2, 3, 2)).is_err());
        assert_eq!(
            bounded_friendly(
                &gamma,
                &phi,
                &FriendlinessConfig::new(R3, S1, 2, 2).with_equality(false)
            ),
            Err(Error::EqualityFreeUnsupported)
        );
        assert_eq!(
            bounded_friendly(
                &gamma,
                &p("exists x, y. x != y"),
                &FriendlinessConfig::new(R1, S1, 2, 2).with_equality(false)
            ),
            Err(Error::EqualityNotEnabled)
        );
    }

    #[test]
    fn s2_blocks_growth_of_old_relations() {
        // Under S2 the single R-loop must stay the only R-tuple, so the
        // complement of R gains points as the domain grows.
        let gamma = corpus::singleton_with_relation();
        let a = {
            let mut a = FiniteStructure::new(gamma.signature().clone(), 1).unwrap();
            a.insert("R", &[0, 0]).unwrap();
            a
        };
        let phi = p("exists x, y. ~R(x,y)");
        let cfg = FriendlinessConfig::new(R1, S2, 1, 3);
        // A″ must satisfy "at most one element" too, so nothing can grow.
        assert_eq!(find_witness(&a, &gamma, &phi, &cfg).unwrap(), None);
        let loose = g(&["exists x, y. R(x,y)"]);
        let w = find_witness(&a, &loose, &phi, &cfg).unwrap().unwrap();
        assert_eq!(w.a_dprime.size(), 2);
        assert_eq!(w.a_dprime.tuple_count("R"), 1);
    }
}
