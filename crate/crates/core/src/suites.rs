//! Seeded randomized suites for the closure properties of friendliness
//! and for the relations between its variants.
//!
//! Generated instances stay within the documented caps, so errors from
//! the checkers are bugs and panic.

use std::collections::BTreeMap;

use crate::formula_enum::{random_prop, random_prop_theory, random_sentence, random_theory, rng, small_signature};
use crate::friendliness::{bounded_friendly, validate_witness, BoundedVerdict, FriendlinessConfig, Witness};
use crate::propositional::{prop_entails, prop_friendly};
use crate::semantics::{entails_bounded, BoundedEntailmentVerdict};
use crate::structure::{BaseRelation, ExpansionRelation};
use crate::syntax::{Formula, Signature, Theory};
use rand::Rng;

/// Outcome of a suite: instances run, premises met per property, and
/// descriptions of violations.
#[derive(Debug, Default)]
pub struct SuiteReport {
    pub instances: usize,
    pub exercised: BTreeMap<&'static str, usize>,
    pub violations: Vec<String>,
}

impl SuiteReport {
    fn check(
        &mut self,
        name: &'static str,
        premises: bool,
        conclusion: impl FnOnce() -> bool,
        show: impl FnOnce() -> String,
    ) {
        if premises {
            *self.exercised.entry(name).or_default() += 1;
            if !conclusion() {
                self.violations.push(format!("{name}: {}", show()));
            }
        }
    }
}

fn vars_of(t: &Theory) -> Signature {
    t.signature().clone()
}

fn with(t: &Theory, f: &Formula) -> Theory {
    t.with(f.clone()).unwrap()
}

/// Friendliness and entailment for one suite.
trait Logic {
    fn friendly(&self, gamma: &Theory, phi: &Formula) -> bool;
    fn entails(&self, gamma: &Theory, phi: &Formula) -> bool;
}

struct Exact;

impl Logic for Exact {
    fn friendly(&self, gamma: &Theory, phi: &Formula) -> bool {
        prop_friendly(gamma, phi).unwrap()
    }
    fn entails(&self, gamma: &Theory, phi: &Formula) -> bool {
        prop_entails(gamma, phi).unwrap()
    }
}

struct Bounded {
    bound: usize,
}

impl Logic for Bounded {
    fn friendly(&self, gamma: &Theory, phi: &Formula) -> bool {
        let cfg = FriendlinessConfig::new(BaseRelation::R3, ExpansionRelation::S1, self.bound, self.bound);
        bounded_friendly(gamma, phi, &cfg).unwrap().is_friendly()
    }
    fn entails(&self, gamma: &Theory, phi: &Formula) -> bool {
        matches!(
            entails_bounded(gamma, phi, self.bound).unwrap(),
            BoundedEntailmentVerdict::EntailedUpToBound(_)
        )
    }
}

fn entails_all<L: Logic>(l: &L, delta: &Theory, gamma: &Theory) -> bool {
    gamma.sentences().iter().all(|g| l.entails(delta, g))
}

struct Instance {
    gamma: Theory,
    delta_sub: Theory,
    delta_super: Theory,
    phi: Formula,
    psi: Formula,
    chi: Formula,
}

/// Checks the seven properties on one instance.
fn run_properties<L: Logic>(l: &L, x: &Instance, report: &mut SuiteReport) {
    let (gamma, phi, psi, chi) = (&x.gamma, &x.phi, &x.psi, &x.chi);
    let show = |extra: &str| format!("gamma={:?} phi={phi} psi={psi} chi={chi} {extra}", gamma.sentences());
    let g_phi = l.friendly(gamma, phi);

    let single = Theory::from_sentences([phi.clone()]).unwrap();
    report.check(
        "right weakening",
        g_phi && l.entails(&single, psi),
        || l.friendly(gamma, psi),
        || show(""),
    );
    report.check(
        "singleton cumulative transitivity",
        g_phi && l.friendly(&with(gamma, phi), psi),
        || l.friendly(gamma, psi),
        || show(""),
    );
    for (name, delta, premise) in [
        (
            "local left strengthening",
            &x.delta_sub,
            entails_all(l, &x.delta_sub, gamma),
        ),
        (
            "local left equivalence",
            &x.delta_sub,
            entails_all(l, &x.delta_sub, gamma) && entails_all(l, gamma, &x.delta_sub),
        ),
        ("local monotony", &x.delta_super, true),
    ] {
        assert!(vars_of(delta).is_subsignature_of(gamma.signature()));
        report.check(
            name,
            g_phi && premise,
            || l.friendly(delta, phi),
            || show(&format!("delta={:?}", delta.sentences())),
        );
    }
    let l_g_phi = gamma.signature().union(&phi.vocabulary().unwrap()).unwrap();
    let l_g_psi = gamma.signature().union(&psi.vocabulary().unwrap()).unwrap();
    let side = psi.vocabulary().unwrap().is_subsignature_of(&l_g_phi)
        && phi.vocabulary().unwrap().is_subsignature_of(&l_g_psi);
    report.check(
        "local disjunction in the premisses",
        side && l.friendly(&with(gamma, phi), chi) && l.friendly(&with(gamma, psi), chi),
        || l.friendly(&with(gamma, &phi.clone().or(psi.clone())), chi),
        || show(""),
    );
    report.check(
        "proof by exhaustion",
        l.friendly(&with(gamma, phi), chi) && l.friendly(&with(gamma, &phi.clone().not()), chi),
        || l.friendly(gamma, chi),
        || show(""),
    );
}

/// The property suite over propositional instances, decided exactly.
pub fn prop6_exact(seed: u64, trials: usize) -> SuiteReport {
    let mut r = rng(seed);
    let base = ["A", "B", "C", "D"];
    let all = ["A", "B", "C", "D", "E", "F"];
    let mut report = SuiteReport::default();
    for _ in 0..trials {
        let width = r.gen_range(1..=4);
        let gvars = &base[..width];
        let gamma = loop {
            let g = random_prop_theory(&mut r, gvars, 2, 3);
            if !g.signature().is_empty() {
                break g;
            }
        };
        let names: Vec<String> = gamma.signature().names().map(str::to_string).collect();
        let own: Vec<&str> = names.iter().map(String::as_str).collect();
        let reach: Vec<&str> = own.iter().copied().chain(all[4..].iter().copied()).collect();
        let phi = random_prop(&mut r, &reach, 3);
        let psi = random_prop(&mut r, &reach, 3);
        let chi = random_prop(&mut r, &reach, 3);
        let delta_sub = Theory::from_sentences((0..r.gen_range(1..=2)).map(|_| random_prop(&mut r, &own, 3))).unwrap();
        let mut delta_super = gamma.clone();
        for _ in 0..r.gen_range(0..=2) {
            delta_super.push(random_prop(&mut r, &own, 2)).unwrap();
        }
        let x = Instance {
            gamma,
            delta_sub,
            delta_super,
            phi,
            psi,
            chi,
        };
        run_properties(&Exact, &x, &mut report);
        report.instances += 1;
    }
    report
}

/// The property suite over first-order instances under (R3, S1) with
/// both bounds equal to `bound`.
pub fn prop6_bounded(seed: u64, trials: usize, bound: usize) -> SuiteReport {
    let mut r = rng(seed);
    let g_sig = small_signature(&["P"], &["E"]);
    let wide = small_signature(&["P", "Q"], &["E"]);
    let mut report = SuiteReport::default();
    let logic = Bounded { bound };
    for _ in 0..trials {
        let gamma = random_theory(&mut r, &g_sig, 2, 3);
        let sub = if r.gen() {
            small_signature(&["P"], &[])
        } else {
            g_sig.clone()
        };
        let mut delta_sub = Theory::over(sub.clone());
        for _ in 0..r.gen_range(1..=2) {
            delta_sub.push(random_sentence(&mut r, &sub, 3)).unwrap();
        }
        let mut delta_super = gamma.clone();
        for _ in 0..r.gen_range(0..=1) {
            delta_super.push(random_sentence(&mut r, &g_sig, 3)).unwrap();
        }
        let x = Instance {
            gamma,
            delta_sub,
            delta_super,
            phi: random_sentence(&mut r, &wide, 3),
            psi: random_sentence(&mut r, &wide, 3),
            chi: random_sentence(&mut r, &wide, 3),
        };
        run_properties(&logic, &x, &mut report);
        report.instances += 1;
    }
    report
}

fn witnesses(v: &BoundedVerdict) -> &[Witness] {
    match v {
        BoundedVerdict::FriendlyUpToBounds { witnesses } => witnesses,
        _ => &[],
    }
}

/// Relations between the twelve (R, S) variants on random instances.
pub fn lattice(seed: u64, trials: usize, base_bound: usize, ext_bound: usize) -> SuiteReport {
    let mut r = rng(seed);
    let g_sig = small_signature(&["P"], &["E"]);
    let wide = small_signature(&["P", "Q"], &["E"]);
    let mut report = SuiteReport::default();
    for _ in 0..trials {
        let gamma = random_theory(&mut r, &g_sig, 2, 3);
        let phi = random_sentence(&mut r, &wide, 3);
        let show = || format!("gamma={:?} phi={phi}", gamma.sentences());
        let mut verdicts = BTreeMap::new();
        for rel in BaseRelation::ALL {
            for exp in ExpansionRelation::ALL {
                let cfg = FriendlinessConfig::new(rel, exp, base_bound, ext_bound);
                verdicts.insert((rel, exp), (cfg, bounded_friendly(&gamma, &phi, &cfg).unwrap()));
            }
        }
        for (&(rel, exp), (_, v)) in &verdicts {
            for w in witnesses(v) {
                if rel == BaseRelation::R1 {
                    for r2 in [BaseRelation::R2, BaseRelation::R3, BaseRelation::R4] {
                        let cfg = verdicts[&(r2, exp)].0;
                        report.check(
                            "witness lifts along R",
                            true,
                            || validate_witness(&gamma, &phi, &cfg, w).unwrap(),
                            show,
                        );
                    }
                }
                if exp == ExpansionRelation::S1 {
                    for e2 in [ExpansionRelation::S2, ExpansionRelation::S3] {
                        let cfg = verdicts[&(rel, e2)].0;
                        report.check(
                            "witness lifts along S",
                            true,
                            || validate_witness(&gamma, &phi, &cfg, w).unwrap(),
                            show,
                        );
                    }
                }
            }
            for (&(rel2, exp2), (_, v2)) in &verdicts {
                if rel2 >= rel && exp2 >= exp && (rel2, exp2) != (rel, exp) {
                    report.check("verdicts are monotone", v.is_friendly(), || v2.is_friendly(), show);
                }
            }
        }
        for exp in ExpansionRelation::ALL {
            let f = |rel| verdicts[&(rel, exp)].1.is_friendly();
            report.check(
                "R2, R3 and R4 coincide",
                true,
                || f(BaseRelation::R2) == f(BaseRelation::R3) && f(BaseRelation::R3) == f(BaseRelation::R4),
                show,
            );
        }
        for rel in BaseRelation::ALL {
            let (_, v) = &verdicts[&(rel, ExpansionRelation::S1)];
            let wider = FriendlinessConfig::new(rel, ExpansionRelation::S1, base_bound, ext_bound + 2);
            report.check(
                "S1 ignores the extension bound",
                true,
                || &bounded_friendly(&gamma, &phi, &wider).unwrap() == v,
                show,
            );
        }
        report.instances += 1;
    }
    report
}
