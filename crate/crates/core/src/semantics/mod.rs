//! Satisfaction, model finding, spectra and bounded entailment.

mod eval;
pub(crate) mod ground;
mod search;

use std::collections::{BTreeMap, BTreeSet};

pub use eval::{compile, eval, eval_sentence, satisfies_all, Assignment, CompiledFormula};
pub use ground::Pins;
pub use search::{SearchOptions, SearchOrder, DEFAULT_NODE_BUDGET};

use crate::error::{Error, Result};
use crate::par::{self, Schedule};
use crate::structure::FiniteStructure;
use crate::syntax::{Formula, Signature, Theory};

use ground::{Cnf, Layout};
use search::Solver;

/// Result of a classical entailment check up to a size bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundedEntailmentVerdict {
    /// No countermodel with at most this many elements.
    EntailedUpToBound(usize),
    /// A structure satisfying the premises and the negated conclusion.
    Refuted(FiniteStructure),
}

impl BoundedEntailmentVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, BoundedEntailmentVerdict::Refuted(_))
    }
}

/// Outcome of one search call.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub models: Vec<FiniteStructure>,
    pub nodes: u64,
}

/// Models of `sentences` over `signature` with exactly `size` elements.
///
/// Stops after `limit` models when given. Functional hints in `signature`
/// are enforced; `pins` fixes individual atoms.
pub fn search_models<'f, I>(
    signature: &Signature,
    sentences: I,
    size: usize,
    pins: Option<&Pins>,
    opts: &SearchOptions,
    limit: Option<usize>,
) -> Result<SearchResult>
where
    I: IntoIterator<Item = &'f Formula>,
{
    let layout = Layout::new(signature, size)?;
    let mut cnf = Cnf::new(layout, pins)?;
    for s in sentences {
        if let Some(v) = s.free_vars().into_iter().next() {
            return Err(Error::FreeVariable(v));
        }
        cnf.add_sentence(s)?;
    }
    let symmetric_from = pins.map_or(0, |p| p.symmetric_from);
    let mut solver = Solver::new(cnf, symmetric_from, *opts);
    let mut models = Vec::new();
    solver.run(|m| {
        models.push(m);
        limit.is_none_or(|l| models.len() < l)
    })?;
    Ok(SearchResult {
        models,
        nodes: solver.nodes,
    })
}

/// A model of `t` with exactly `size` elements, if one exists.
pub fn find_model(t: &Theory, size: usize) -> Result<Option<FiniteStructure>> {
    find_model_with(t, size, &SearchOptions::default())
}

pub fn find_model_with(t: &Theory, size: usize, opts: &SearchOptions) -> Result<Option<FiniteStructure>> {
    Ok(search_models(t.signature(), t.sentences(), size, None, opts, Some(1))?
        .models
        .pop())
}

/// All models of `t` of the given size, one per isomorphism class.
pub fn enumerate_models(t: &Theory, size: usize) -> Result<Vec<FiniteStructure>> {
    enumerate_models_over(t.signature(), t.sentences(), size, &SearchOptions::default())
}

/// Like [`enumerate_models`] over an explicit signature, which may contain
/// symbols the sentences do not mention.
///
/// Up to six elements each class is represented by its canonical labeling,
/// and classes are ordered by canonical key. Beyond that, representatives
/// appear in search order.
pub fn enumerate_models_over<'f, I>(
    signature: &Signature,
    sentences: I,
    size: usize,
    opts: &SearchOptions,
) -> Result<Vec<FiniteStructure>>
where
    I: IntoIterator<Item = &'f Formula>,
{
    let found = search_models(signature, sentences, size, None, opts, None)?.models;
    Ok(iso_classes(found))
}

/// One representative per isomorphism class.
pub fn iso_classes(found: Vec<FiniteStructure>) -> Vec<FiniteStructure> {
    let Some(first) = found.first() else {
        return found;
    };
    if first.size() <= 6 {
        let mut classes: BTreeMap<Vec<bool>, FiniteStructure> = BTreeMap::new();
        for m in found {
            let (key, perm) = m.canonical_labeling();
            classes.entry(key).or_insert_with(|| m.permuted(&perm));
        }
        classes.into_values().collect()
    } else {
        let mut reps: Vec<FiniteStructure> = Vec::new();
        for m in found {
            let seen = reps.iter().any(|r| r.find_isomorphism(&m).ok().flatten().is_some());
            if !seen {
                reps.push(m);
            }
        }
        reps
    }
}

/// Sizes in `1..=max_size` at which `f` has a model.
pub fn spectrum(f: &Formula, max_size: usize) -> Result<BTreeSet<usize>> {
    spectrum_with(f, max_size, &SearchOptions::default(), Schedule::default())
}

pub fn spectrum_with(
    f: &Formula,
    max_size: usize,
    opts: &SearchOptions,
    schedule: Schedule,
) -> Result<BTreeSet<usize>> {
    let t = Theory::from_sentences([f.clone()])?;
    let sizes: Vec<usize> = (1..=max_size).collect();
    let found = par::try_map(schedule, &sizes, |&n| {
        Ok::<_, Error>(find_model_with(&t, n, opts)?.map(|_| n))
    })?;
    Ok(found.into_iter().flatten().collect())
}

/// Searches for a countermodel to Γ ⊢ φ with at most `max_size` elements.
pub fn entails_bounded(gamma: &Theory, phi: &Formula, max_size: usize) -> Result<BoundedEntailmentVerdict> {
    entails_bounded_with(gamma, phi, max_size, &SearchOptions::default())
}

pub fn entails_bounded_with(
    gamma: &Theory,
    phi: &Formula,
    max_size: usize,
    opts: &SearchOptions,
) -> Result<BoundedEntailmentVerdict> {
    if max_size == 0 {
        return Err(Error::EmptyDomain);
    }
    let t = gamma.with(phi.clone().not())?;
    for n in 1..=max_size {
        if let Some(c) = find_model_with(&t, n, opts)? {
            if !satisfies_all(&c, t.sentences())? {
                return Err(Error::InvalidConfig("countermodel failed re-evaluation".to_string()));
            }
            return Ok(BoundedEntailmentVerdict::Refuted(c));
        }
    }
    Ok(BoundedEntailmentVerdict::EntailedUpToBound(max_size))
}

/// A finite model of a sentence built from equality alone, if it has one.
///
/// Bare sets of sizes at least the quantifier rank agree on all sentences
/// of that rank, so only sizes up to the rank need to be tried.
pub fn pure_equality_finite_model(f: &Formula) -> Result<Option<FiniteStructure>> {
    if !f.relation_names().is_empty() {
        return Err(Error::NotPureEquality);
    }
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(Error::FreeVariable(v));
    }
    for n in 1..=f.quantifier_rank().max(1) {
        let s = FiniteStructure::bare(n);
        if eval_sentence(&s, f)? {
            return Ok(Some(s));
        }
    }
    Ok(None)
}
