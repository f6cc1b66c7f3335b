use std::collections::BTreeMap;

use clap::{ArgGroup, Args};
use folfriend::beth::{find_explicit_definition_in, implicitly_defines_in};
use folfriend::friendliness::bounded_friendly_with;
use folfriend::par::Schedule;
use folfriend::semantics::{entails_bounded_with, enumerate_models_over, find_model_with, spectrum_with};
use folfriend::{
    distinguishing_sentence, ef_equivalent, eval, pretty_print, prop_consistency_characterization,
    prop_counter_valuation, prop_entails, prop_friendly_via_refinement, Assignment, BaseRelation,
    BoundedEntailmentVerdict, BoundedVerdict, Definability, ExpansionRelation, FriendlinessConfig, Signature, Theory,
};
use serde_json::{json, Value};

use crate::input;
use crate::report::{structure, Report};
use crate::{Failure, Global};

pub enum Outcome {
    Failed(Failure),
    ReportAndFail(Report, Failure),
}

impl From<Failure> for Outcome {
    fn from(f: Failure) -> Self {
        Outcome::Failed(f)
    }
}

impl From<folfriend::Error> for Outcome {
    fn from(e: folfriend::Error) -> Self {
        Outcome::Failed(e.into())
    }
}

pub type Run = Result<Report, Outcome>;

fn signature_json(sig: &Signature) -> Value {
    let relations: BTreeMap<&str, usize> = sig.symbols().collect();
    let functional: BTreeMap<&str, usize> = sig.functional_hints().collect();
    json!({ "relations": relations, "functional": functional, "equality": sig.equality_enabled() })
}

fn sentences_json(t: &Theory) -> Value {
    t.sentences().iter().map(pretty_print).collect()
}

#[derive(Args)]
#[command(group(ArgGroup::new("input").required(true).args(["formula", "theory", "structure"])))]
pub struct ParseArgs {
    /// Formula text, or a file holding one.
    #[arg(long)]
    formula: Option<String>,
    /// Theory file, or `;`-separated sentences.
    #[arg(long)]
    theory: Option<String>,
    /// Structure JSON file.
    #[arg(long)]
    structure: Option<String>,
}

pub fn parse(g: &Global, a: &ParseArgs) -> Run {
    let mut r = Report::new("parse");
    if let Some(text) = &a.formula {
        let f = input::formula(g, text)?;
        r.set("formula", pretty_print(&f))
            .set("quantifier_rank", f.quantifier_rank())
            .set("free_variables", f.free_vars().into_iter().collect::<Vec<_>>())
            .set("signature", signature_json(&f.vocabulary()?));
    } else if let Some(text) = &a.theory {
        let t = input::premises(g, Some(text))?;
        r.set("sentences", sentences_json(&t))
            .set("signature", signature_json(t.signature()));
    } else if let Some(path) = &a.structure {
        r.set("structure", structure(&input::structure(path)?));
    }
    Ok(r)
}

#[derive(Args)]
pub struct EvalArgs {
    /// Structure JSON file.
    #[arg(long)]
    structure: String,
    /// Formula text, or a file holding one.
    #[arg(long)]
    formula: String,
    /// Values of free variables, as `x=0`.
    #[arg(long = "assign", value_name = "VAR=ELEMENT")]
    assign: Vec<String>,
}

pub fn evaluate(g: &Global, a: &EvalArgs) -> Run {
    let s = input::structure(&a.structure)?;
    let f = input::formula(g, &a.formula)?;
    let mut asg = Assignment::new();
    for item in &a.assign {
        let (v, e) = item
            .split_once('=')
            .and_then(|(v, e)| Some((v.trim().to_string(), e.trim().parse::<usize>().ok()?)))
            .ok_or_else(|| Failure::Usage(format!("bad assignment {item:?}; expected VAR=ELEMENT")))?;
        asg.insert(v, e);
    }
    let value = eval(&s, &f, &asg)?;
    let mut r = Report::new("eval");
    r.set("formula", pretty_print(&f))
        .set("assignment", json!(asg))
        .set("value", value);
    Ok(r)
}

#[derive(Args)]
pub struct ModelsArgs {
    /// Theory file, or `;`-separated sentences.
    #[arg(long)]
    theory: Option<String>,
    /// Domain size.
    #[arg(long)]
    size: usize,
    /// List one model per isomorphism class instead of the first found.
    #[arg(long)]
    all: bool,
}

pub fn models(g: &Global, a: &ModelsArgs) -> Run {
    let t = input::premises(g, a.theory.as_deref())?;
    let opts = g.options();
    let mut r = Report::new("models");
    r.set("size", a.size);
    if a.all {
        let found = enumerate_models_over(t.signature(), t.sentences(), a.size, &opts)?;
        r.set("count", found.len())
            .set("models", found.iter().map(structure).collect::<Vec<_>>());
    } else {
        let found = find_model_with(&t, a.size, &opts)?;
        r.set("satisfiable", found.is_some())
            .set("model", found.as_ref().map(structure));
    }
    Ok(r)
}

#[derive(Args)]
pub struct SpectrumArgs {
    /// Sentence text, or a file holding sentences to conjoin.
    #[arg(long)]
    formula: String,
    /// Largest size examined.
    #[arg(long)]
    max: usize,
}

pub fn spectrum(g: &Global, a: &SpectrumArgs) -> Run {
    let f = input::sentence(g, &a.formula)?;
    let sizes = spectrum_with(&f, a.max, &g.options(), Schedule::default())?;
    let mut r = Report::new("spectrum");
    r.set("formula", pretty_print(&f))
        .set("max_size", a.max)
        .set("sizes", sizes.into_iter().collect::<Vec<_>>());
    Ok(r)
}

#[derive(Args)]
pub struct EntailsArgs {
    /// Premises: theory file or `;`-separated sentences.
    #[arg(long)]
    gamma: Option<String>,
    /// Conclusion sentence.
    #[arg(long)]
    phi: String,
    /// Largest countermodel size examined.
    #[arg(long)]
    bound: usize,
}

pub fn entails(g: &Global, a: &EntailsArgs) -> Run {
    let gamma = input::premises(g, a.gamma.as_deref())?;
    let phi = input::sentence(g, &a.phi)?;
    let mut r = Report::new("entails");
    r.set("premises", sentences_json(&gamma))
        .set("conclusion", pretty_print(&phi))
        .set("bound", a.bound);
    match entails_bounded_with(&gamma, &phi, a.bound, &g.options())? {
        BoundedEntailmentVerdict::EntailedUpToBound(n) => {
            r.set("verdict", "entailed_up_to_bound");
            r.caveats.push(format!(
                "no countermodel with at most {n} elements; larger and infinite countermodels were not examined"
            ));
        }
        BoundedEntailmentVerdict::Refuted(c) => {
            r.set("verdict", "refuted").set("countermodel", structure(&c));
        }
    }
    Ok(r)
}

#[derive(Args)]
pub struct FriendlyPropArgs {
    /// Premises: theory file or `;`-separated propositional formulas.
    #[arg(long)]
    gamma: Option<String>,
    /// Target formula.
    #[arg(long)]
    phi: String,
}

pub fn friendly_prop(g: &Global, a: &FriendlyPropArgs) -> Run {
    let gamma = input::premises(g, a.gamma.as_deref())?;
    let phi = input::sentence(g, &a.phi)?;
    let counter = prop_counter_valuation(&gamma, &phi)?;
    let friendly = counter.is_none();
    let mut checks = serde_json::Map::new();
    checks.insert(
        "consistency".into(),
        prop_consistency_characterization(&gamma, &phi)?.into(),
    );
    checks.insert(
        "refinement".into(),
        match prop_friendly_via_refinement(&gamma, &phi) {
            Ok(b) => b.into(),
            Err(folfriend::Error::TooManySharedVariables { .. }) => Value::Null,
            Err(e) => return Err(e.into()),
        },
    );
    let mut r = Report::new("friendly-prop");
    r.set("premises", sentences_json(&gamma))
        .set("target", pretty_print(&phi))
        .set("friendly", friendly)
        .set("conclusive", true)
        .set("entails", prop_entails(&gamma, &phi)?)
        .set("counter_valuation", json!(counter))
        .set("cross_checks", Value::Object(checks));
    Ok(r)
}

#[derive(Args)]
pub struct FriendlyArgs {
    /// Premises: theory file or `;`-separated sentences.
    #[arg(long)]
    gamma: Option<String>,
    /// Target sentence.
    #[arg(long)]
    phi: String,
    /// Base relation r1..r4.
    #[arg(long, default_value = "r1", value_parser = parse_base)]
    relation: BaseRelation,
    /// Expansion relation s1..s3.
    #[arg(long, default_value = "s1", value_parser = parse_expansion)]
    expansion: ExpansionRelation,
    /// Largest base model examined.
    #[arg(long)]
    base_bound: usize,
    /// Largest final expansion examined; defaults to the base bound.
    #[arg(long)]
    ext_bound: Option<usize>,
}

fn parse_base(s: &str) -> Result<BaseRelation, String> {
    BaseRelation::parse(s).ok_or_else(|| format!("expected r1, r2, r3 or r4, got {s:?}"))
}

fn parse_expansion(s: &str) -> Result<ExpansionRelation, String> {
    ExpansionRelation::parse(s).ok_or_else(|| format!("expected s1, s2 or s3, got {s:?}"))
}

pub fn verdict_json(r: &mut Report, v: &BoundedVerdict) {
    r.set("friendly", v.is_friendly()).set("conclusive", v.is_conclusive());
    match v {
        BoundedVerdict::FriendlyUpToBounds { witnesses } => {
            let list: Vec<Value> = witnesses
                .iter()
                .map(|w| json!({ "base": structure(&w.base), "a_prime": structure(&w.a_prime), "a_dprime": structure(&w.a_dprime) }))
                .collect();
            r.set("verdict", "friendly_up_to_bounds").set("witnesses", list);
        }
        BoundedVerdict::NotFriendlyWithinBounds { refuting_base, .. } => {
            r.set("verdict", "not_friendly_within_bounds")
                .set("refuting_base", structure(refuting_base));
        }
    }
}

pub fn friendly(g: &Global, a: &FriendlyArgs) -> Run {
    let gamma = input::premises(g, a.gamma.as_deref())?;
    let phi = input::sentence(g, &a.phi)?;
    let cfg = FriendlinessConfig::new(
        a.relation,
        a.expansion,
        a.base_bound,
        a.ext_bound.unwrap_or(a.base_bound),
    )
    .with_equality(g.equality());
    let run = bounded_friendly_with(&gamma, &phi, &cfg, &g.options(), Schedule::default())?;
    let mut r = Report::new("friendly");
    r.set("premises", sentences_json(&gamma))
        .set("target", pretty_print(&phi))
        .set(
            "config",
            json!({
                "relation": cfg.base.name(),
                "expansion": cfg.expansion.name(),
                "base_bound": cfg.base_bound,
                "ext_bound": cfg.ext_bound,
                "equality": cfg.equality,
            }),
        );
    verdict_json(&mut r, &run.verdict);
    r.set("base_models", run.base_models).set("nodes", run.nodes);
    r.caveats.extend(run.verdict.caveat(&cfg));
    Ok(r)
}

#[derive(Args)]
pub struct EfArgs {
    /// Left structure JSON file.
    #[arg(long)]
    left: String,
    /// Right structure JSON file.
    #[arg(long)]
    right: String,
    /// Number of rounds.
    #[arg(short, long)]
    k: usize,
}

pub fn ef(_g: &Global, a: &EfArgs) -> Run {
    let left = input::structure(&a.left)?;
    let right = input::structure(&a.right)?;
    let equivalent = ef_equivalent(&left, &right, a.k)?;
    let separating = distinguishing_sentence(&left, &right, a.k)?;
    let mut r = Report::new("ef");
    r.set("rounds", a.k)
        .set("equivalent", equivalent)
        .set("distinguishing_sentence", separating.as_ref().map(pretty_print));
    Ok(r)
}

#[derive(Args)]
pub struct BethArgs {
    /// Theory file or `;`-separated sentences.
    #[arg(long)]
    gamma: String,
    /// Relation symbol whose definability is checked.
    #[arg(long)]
    symbol: String,
    /// Largest structure examined.
    #[arg(long)]
    bound: usize,
    /// Largest candidate definition depth.
    #[arg(long, default_value_t = 2)]
    depth: usize,
}

pub fn beth(g: &Global, a: &BethArgs) -> Run {
    let gamma = input::premises(g, Some(&a.gamma))?;
    let opts = g.options();
    let sig = gamma.signature();
    let mut r = Report::new("beth");
    r.set("premises", sentences_json(&gamma))
        .set("symbol", a.symbol.as_str())
        .set("bound", a.bound);
    match implicitly_defines_in(sig, &gamma, &a.symbol, a.bound, &opts)? {
        Definability::Defined { .. } => {
            r.set("implicitly_defined", true);
            let psi = find_explicit_definition_in(sig, &gamma, &a.symbol, a.depth, a.bound, &opts)?;
            r.set("explicit_definition", psi.as_ref().map(pretty_print));
        }
        Definability::Counterexample { base, with_p, other } => {
            r.set("implicitly_defined", false).set(
                "counterexample",
                json!({ "base": structure(&base), "first": structure(&with_p), "second": structure(&other) }),
            );
        }
    }
    r.caveats
        .push(format!("checked on structures with at most {} elements only", a.bound));
    Ok(r)
}
