use clap::Args;
use folfriend::beth::implicitly_defines_in;
use folfriend::corpus::{
    at_least_schema, dedekind, defined_by_edges, field_axioms, odd_cycle_free_graphs, singleton_with_complement,
    singleton_with_relation, triangle_free_graphs, two_coloring,
};
use folfriend::formula_enum::{random_pure_equality, rng, small_signature};
use folfriend::friendliness::bounded_friendly_with;
use folfriend::par::Schedule;
use folfriend::semantics::{entails_bounded_with, find_model_with, satisfies_all, spectrum_with, SearchOptions};
use folfriend::suites;
use folfriend::{
    eval_sentence, find_explicit_definition, pretty_print, pure_equality_finite_model, BaseRelation,
    BoundedEntailmentVerdict, BoundedVerdict, Definability, ExpansionRelation, FiniteStructure, Formula,
    FriendlinessConfig, Theory,
};
use rand::Rng;
use serde_json::{json, Map, Value};

use crate::commands::{Outcome, Run};
use crate::report::{structure, Report};
use crate::{Failure, Global};
use BaseRelation::*;
use ExpansionRelation::*;

#[derive(Args)]
pub struct ReproArgs {
    /// Entry to run.
    #[arg(required_unless_present = "all", conflicts_with = "all")]
    name: Option<String>,
    /// Run every entry.
    #[arg(long)]
    all: bool,
    /// Instances for the randomized suites.
    #[arg(long)]
    trials: Option<usize>,
}

struct Ctx {
    opts: SearchOptions,
    trials: Option<usize>,
    current: &'static str,
    caveats: Vec<String>,
}

type Check = Result<(bool, Value), Failure>;

struct Entry {
    name: &'static str,
    claim: &'static str,
    expected: &'static str,
    run: fn(&mut Ctx) -> Check,
}

const ENTRIES: &[Entry] = &[
    Entry {
        name: "example-field-6",
        claim: "finite fields have prime-power order, so none has six elements",
        expected: "no model of the field axioms of size 6; models of sizes 2, 3, 4, 5 and 7",
        run: field_6,
    },
    Entry {
        name: "compactness-dedekind",
        claim: "every finite part of the at-least-n schema has a model without a witness for the Dedekind sentence",
        expected: "conclusive not-friendly verdict under (r3, s1) for fragments 1 to 4",
        run: compactness_dedekind,
    },
    Entry {
        name: "compactness-graphs",
        claim: "triangle-freeness alone does not give a 2-colouring, while excluding odd cycles does",
        expected: "triangle-free fragment refuted by the 5-cycle; odd-cycle-free graphs to 5 friendly",
        run: compactness_graphs,
    },
    Entry {
        name: "reduction-s3",
        claim: "a one-element structure with a loop has only an infinite witness for the Dedekind sentence",
        expected:
            "countermodel of size 1 to entailment, negation entailed to 4, non-conclusive not-friendly under (r1, s3)",
        run: reduction_s3,
    },
    Entry {
        name: "reduction-s2",
        claim: "the same failure with the complement of R nonempty, under exact tuple preservation",
        expected: "non-conclusive not-friendly under (r1, s2) and a countermodel to entailment",
        run: reduction_s2,
    },
    Entry {
        name: "spectrum-dedekind",
        claim: "an injective non-surjective total function needs an infinite domain",
        expected: "empty spectrum up to 4",
        run: spectrum_dedekind,
    },
    Entry {
        name: "pure-equality",
        claim: "a satisfiable sentence of pure equality has a model no larger than its quantifier rank",
        expected: "every sampled satisfiable sentence has such a model",
        run: pure_equality,
    },
    Entry {
        name: "beth-demo",
        claim: "a relation pinned down by its theory is explicitly definable",
        expected: "P defined implicitly and explicitly from E to bound 4; unconstrained P refuted at size 1",
        run: beth_demo,
    },
    Entry {
        name: "prop-suite",
        claim: "the seven closure properties hold for propositional friendliness",
        expected: "zero violations on random instances",
        run: prop_suite,
    },
    Entry {
        name: "lattice-suite",
        claim: "witnesses lift along the base and expansion relations and verdicts are monotone",
        expected: "zero violations on random instances with bounds (3, 4)",
        run: lattice_suite,
    },
];

pub fn names() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().map(|e| e.name)
}

fn friendly(ctx: &mut Ctx, gamma: &Theory, phi: &Formula, cfg: FriendlinessConfig) -> Result<BoundedVerdict, Failure> {
    let run = bounded_friendly_with(gamma, phi, &cfg, &ctx.opts, Schedule::default())?;
    if let (false, Some(c)) = (run.verdict.is_friendly(), run.verdict.caveat(&cfg)) {
        ctx.caveats.push(format!("{}: {c}", ctx.current));
    }
    Ok(run.verdict)
}

fn field_6(ctx: &mut Ctx) -> Check {
    let t = field_axioms();
    let mut sizes = Map::new();
    let mut ok = true;
    for n in [2, 3, 4, 5, 6, 7] {
        let m = find_model_with(&t, n, &ctx.opts)?;
        let valid = match &m {
            Some(m) => satisfies_all(m, t.sentences())?,
            None => true,
        };
        ok &= valid && m.is_some() == (n != 6);
        sizes.insert(n.to_string(), m.is_some().into());
    }
    Ok((ok, json!({ "model_found": sizes })))
}

fn compactness_dedekind(ctx: &mut Ctx) -> Check {
    let mut ok = true;
    let mut out = Map::new();
    for k in 1..=4 {
        let v = friendly(
            ctx,
            &at_least_schema(k),
            &dedekind(),
            FriendlinessConfig::new(R3, S1, k, k),
        )?;
        ok &= !v.is_friendly() && v.is_conclusive();
        out.insert(
            format!("at-least:{k}"),
            json!({ "friendly": v.is_friendly(), "conclusive": v.is_conclusive() }),
        );
    }
    Ok((ok, Value::Object(out)))
}

fn cycle(n: usize) -> FiniteStructure {
    let mut c =
        FiniteStructure::new(folfriend::Signature::from_symbols([("E", 2)]).expect("signature"), n).expect("structure");
    for i in 0..n {
        c.insert("E", &[i, (i + 1) % n]).expect("edge");
        c.insert("E", &[(i + 1) % n, i]).expect("edge");
    }
    c
}

fn compactness_graphs(ctx: &mut Ctx) -> Check {
    let cfg = FriendlinessConfig::new(R1, S1, 5, 5);
    let tri = friendly(ctx, &triangle_free_graphs(), &two_coloring(), cfg)?;
    let c5 = match &tri {
        BoundedVerdict::NotFriendlyWithinBounds {
            refuting_base,
            conclusive: true,
        } => refuting_base.is_isomorphic(&cycle(5))?,
        _ => false,
    };
    let odd = friendly(ctx, &odd_cycle_free_graphs(5), &two_coloring(), cfg)?;
    let refuting = match &tri {
        BoundedVerdict::NotFriendlyWithinBounds { refuting_base, .. } => structure(refuting_base),
        _ => Value::Null,
    };
    Ok((
        c5 && odd.is_friendly(),
        json!({
            "triangle_free": { "friendly": tri.is_friendly(), "conclusive": tri.is_conclusive(), "refuting_base": refuting, "five_cycle": c5 },
            "odd_cycle_free": { "friendly": odd.is_friendly() },
        }),
    ))
}

fn entailment(ctx: &Ctx, gamma: &Theory, phi: &Formula, n: usize) -> Result<Value, Failure> {
    Ok(match entails_bounded_with(gamma, phi, n, &ctx.opts)? {
        BoundedEntailmentVerdict::EntailedUpToBound(n) => json!({ "entailed_up_to": n }),
        BoundedEntailmentVerdict::Refuted(c) => json!({ "countermodel": structure(&c) }),
    })
}

fn reduction(ctx: &mut Ctx, gamma: Theory, exp: ExpansionRelation) -> Check {
    let phi = dedekind();
    let pos = entailment(ctx, &gamma, &phi, 4)?;
    let neg = entailment(ctx, &gamma, &phi.clone().not(), 4)?;
    let cfg = FriendlinessConfig::new(R1, exp, 1, 6);
    let v = friendly(ctx, &gamma, &phi, cfg)?;
    let caveat = v.caveat(&cfg).unwrap_or_default();
    let refuted_small = pos["countermodel"]["domain_size"] == json!(1);
    let ok = refuted_small
        && neg == json!({ "entailed_up_to": 4 })
        && !v.is_friendly()
        && !v.is_conclusive()
        && caveat.contains("infinite");
    Ok((
        ok,
        json!({
            "entails_phi": pos,
            "entails_not_phi": neg,
            "friendly": v.is_friendly(),
            "conclusive": v.is_conclusive(),
            "premises": gamma.sentences().iter().map(pretty_print).collect::<Vec<_>>(),
        }),
    ))
}

fn reduction_s3(ctx: &mut Ctx) -> Check {
    reduction(ctx, singleton_with_relation(), S3)
}

fn reduction_s2(ctx: &mut Ctx) -> Check {
    reduction(ctx, singleton_with_complement(), S2)
}

fn spectrum_dedekind(ctx: &mut Ctx) -> Check {
    let sizes = spectrum_with(&dedekind(), 4, &ctx.opts, Schedule::default())?;
    Ok((sizes.is_empty(), json!({ "sizes": sizes })))
}

fn pure_equality(ctx: &mut Ctx) -> Check {
    let mut r = rng(9);
    let wanted = ctx.trials.unwrap_or(100);
    let (mut satisfiable, mut failures) = (0, Vec::new());
    for _ in 0..wanted * 20 {
        if satisfiable == wanted {
            break;
        }
        let rank = r.gen_range(1..=4);
        let phi = random_pure_equality(&mut r, rank);
        if !(1..=6)
            .map(FiniteStructure::bare)
            .any(|s| eval_sentence(&s, &phi).unwrap_or(false))
        {
            continue;
        }
        satisfiable += 1;
        let good = match pure_equality_finite_model(&phi)? {
            Some(m) => m.size() <= phi.quantifier_rank().max(1) && eval_sentence(&m, &phi)?,
            None => false,
        };
        if !good {
            failures.push(pretty_print(&phi));
        }
    }
    Ok((
        failures.is_empty() && satisfiable == wanted,
        json!({ "satisfiable_sentences": satisfiable, "failures": failures }),
    ))
}

fn beth_demo(ctx: &mut Ctx) -> Check {
    let gamma = defined_by_edges();
    let implicit = implicitly_defines_in(gamma.signature(), &gamma, "P", 4, &ctx.opts)?.is_defined();
    let psi = find_explicit_definition(&gamma, "P", 2, 4)?;
    let certified = match &psi {
        Some(psi) => {
            let bic = Formula::forall("x", psi.clone().iff(Formula::atom("P", &["x"])));
            entails_bounded_with(&gamma, &bic, 4, &ctx.opts)? == BoundedEntailmentVerdict::EntailedUpToBound(4)
        }
        None => false,
    };
    let sig = small_signature(&["P"], &["E"]);
    let free = implicitly_defines_in(&sig, &Theory::over(sig.clone()), "P", 3, &ctx.opts)?;
    let free_size = match &free {
        Definability::Counterexample { base, .. } => Some(base.size()),
        Definability::Defined { .. } => None,
    };
    Ok((
        implicit && certified && free_size == Some(1),
        json!({
            "implicitly_defined": implicit,
            "explicit_definition": psi.as_ref().map(pretty_print),
            "certified_to": 4,
            "unconstrained_counterexample_size": free_size,
        }),
    ))
}

fn suite_value(rep: &suites::SuiteReport) -> Value {
    json!({
        "instances": rep.instances,
        "premises_met": rep.exercised,
        "violations": rep.violations,
    })
}

fn prop_suite(ctx: &mut Ctx) -> Check {
    let rep = suites::prop6_exact(3, ctx.trials.unwrap_or(1000));
    Ok((rep.violations.is_empty(), suite_value(&rep)))
}

fn lattice_suite(ctx: &mut Ctx) -> Check {
    let rep = suites::lattice(6, ctx.trials.unwrap_or(20), 3, 4);
    Ok((rep.violations.is_empty(), suite_value(&rep)))
}

pub fn run(g: &Global, a: &ReproArgs) -> Run {
    let selected: Vec<&Entry> = if a.all {
        ENTRIES.iter().collect()
    } else {
        let name = a.name.as_deref().unwrap_or_default();
        let e = ENTRIES.iter().find(|e| e.name == name).ok_or_else(|| {
            Failure::Usage(format!(
                "unknown repro {name:?}; available: {}",
                names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        vec![e]
    };
    let mut ctx = Ctx {
        opts: g.options(),
        trials: a.trials,
        current: "",
        caveats: Vec::new(),
    };
    let mut entries = Vec::new();
    let mut failed = Vec::new();
    for e in selected {
        ctx.current = e.name;
        let (pass, observed) = (e.run)(&mut ctx)?;
        if !pass {
            failed.push(e.name);
        }
        entries.push(json!({
            "name": e.name,
            "claim": e.claim,
            "expected": e.expected,
            "observed": observed,
            "status": if pass { "PASS" } else { "FAIL" },
        }));
    }
    let mut r = Report::new("repro");
    let total = entries.len();
    r.set("entries", entries)
        .set("passed", total - failed.len())
        .set("failed", failed.len());
    r.caveats = ctx.caveats;
    if failed.is_empty() {
        Ok(r)
    } else {
        let msg = format!("repro failed: {}", failed.join(", "));
        Err(Outcome::ReportAndFail(r, Failure::Repro(msg)))
    }
}
