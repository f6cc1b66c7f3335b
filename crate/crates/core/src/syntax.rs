//! Relational first-order syntax: signatures, formulas and theories.
//!
//! Terms are variables only. Constants and functions are expected to be
//! relationalized, with a functional hint on the relation so the model finder
//! can search it as a table instead of a bit set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// A finite relational vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    symbols: BTreeMap<String, usize>,
    equality: bool,
    functional: BTreeMap<String, usize>,
}

impl Signature {
    /// Empty signature with equality enabled.
    pub fn new() -> Self {
        Signature {
            symbols: BTreeMap::new(),
            equality: true,
            functional: BTreeMap::new(),
        }
    }

    pub fn without_equality() -> Self {
        Signature {
            equality: false,
            ..Signature::new()
        }
    }

    /// Builds a signature from `(name, arity)` pairs.
    pub fn from_symbols<'a, I>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, usize)>,
    {
        let mut sig = Signature::new();
        for (name, arity) in symbols {
            sig.add_symbol(name, arity)?;
        }
        Ok(sig)
    }

    /// Adds a relation symbol. Re-adding with the same arity is a no-op.
    pub fn add_symbol(&mut self, name: &str, arity: usize) -> Result<()> {
        match self.symbols.get(name) {
            Some(&existing) if existing != arity => Err(Error::ArityClash {
                name: name.to_string(),
                left: existing,
                right: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.symbols.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    /// Marks coordinate `output` of `name` as the function value.
    pub fn add_functional(&mut self, name: &str, output: usize) -> Result<()> {
        let arity = self
            .arity(name)
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))?;
        if arity == 0 || output >= arity {
            return Err(Error::InvalidFunctionalHint {
                name: name.to_string(),
                output,
                arity,
            });
        }
        if let Some(&prev) = self.functional.get(name) {
            if prev != output {
                return Err(Error::InvalidFunctionalHint {
                    name: name.to_string(),
                    output,
                    arity,
                });
            }
        }
        self.functional.insert(name.to_string(), output);
        Ok(())
    }

    pub fn set_equality(&mut self, enabled: bool) {
        self.equality = enabled;
    }

    pub fn with_equality(mut self, enabled: bool) -> Self {
        self.equality = enabled;
        self
    }

    pub fn equality_enabled(&self) -> bool {
        self.equality
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.symbols.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    /// Output coordinate of a functional relation, if hinted.
    pub fn functional_output(&self, name: &str) -> Option<usize> {
        self.functional.get(name).copied()
    }

    pub fn functional_hints(&self) -> impl Iterator<Item = (&str, usize)> {
        self.functional.iter().map(|(n, &k)| (n.as_str(), k))
    }

    /// Symbols in name order.
    pub fn symbols(&self) -> impl Iterator<Item = (&str, usize)> {
        self.symbols.iter().map(|(n, &a)| (n.as_str(), a))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.symbols.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// True when every symbol of `self` occurs in `other` with the same arity.
    pub fn is_subsignature_of(&self, other: &Signature) -> bool {
        self.symbols.iter().all(|(n, &a)| other.symbols.get(n) == Some(&a))
    }

    /// Same relation symbols and arities; equality flag and hints are ignored.
    pub fn same_symbols(&self, other: &Signature) -> bool {
        self.symbols == other.symbols
    }

    pub fn union(&self, other: &Signature) -> Result<Signature> {
        let mut out = self.clone();
        for (name, arity) in other.symbols() {
            out.add_symbol(name, arity)?;
        }
        for (name, k) in other.functional_hints() {
            out.add_functional(name, k)?;
        }
        out.equality = self.equality || other.equality;
        Ok(out)
    }

    pub fn intersection(&self, other: &Signature) -> Result<Signature> {
        let mut out = Signature::new().with_equality(self.equality && other.equality);
        for (name, arity) in self.symbols() {
            match other.arity(name) {
                Some(a) if a == arity => {
                    out.add_symbol(name, arity)?;
                }
                Some(a) => {
                    return Err(Error::ArityClash {
                        name: name.to_string(),
                        left: arity,
                        right: a,
                    })
                }
                None => {}
            }
        }
        for (name, k) in self.functional_hints() {
            if out.contains(name) && other.functional_output(name) == Some(k) {
                out.add_functional(name, k)?;
            }
        }
        Ok(out)
    }

    /// Symbols of `self` that are not in `other`; hints carried along.
    pub fn difference(&self, other: &Signature) -> Signature {
        let mut out = Signature::new().with_equality(self.equality);
        for (name, arity) in self.symbols() {
            if !other.contains(name) {
                out.symbols.insert(name.to_string(), arity);
                if let Some(k) = self.functional_output(name) {
                    out.functional.insert(name.to_string(), k);
                }
            }
        }
        out
    }

    /// Drops a symbol along with its hint.
    pub fn without(&self, name: &str) -> Signature {
        let mut out = self.clone();
        out.symbols.remove(name);
        out.functional.remove(name);
        out
    }
}

impl Default for Signature {
    fn default() -> Self {
        Signature::new()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (name, arity)) in self.symbols().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name}/{arity}")?;
        }
        write!(f, "}}")
    }
}

/// First-order formula over a relational signature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(String, Vec<String>),
    Equals(String, String),
    True,
    False,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    ForAll(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom<S: Into<String>>(rel: S, args: &[&str]) -> Formula {
        Formula::Atom(rel.into(), args.iter().map(|a| a.to_string()).collect())
    }

    /// 0-ary atom, i.e. a propositional variable.
    pub fn prop<S: Into<String>>(name: S) -> Formula {
        Formula::Atom(name.into(), Vec::new())
    }

    pub fn eq(a: &str, b: &str) -> Formula {
        Formula::Equals(a.to_string(), b.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn iff(self, other: Formula) -> Formula {
        Formula::Iff(Box::new(self), Box::new(other))
    }

    pub fn forall(var: &str, body: Formula) -> Formula {
        Formula::ForAll(var.to_string(), Box::new(body))
    }

    pub fn exists(var: &str, body: Formula) -> Formula {
        Formula::Exists(var.to_string(), Box::new(body))
    }

    /// Nested universal closure over `vars`, outermost first.
    pub fn forall_many(vars: &[&str], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, v| Formula::forall(v, acc))
    }

    pub fn exists_many(vars: &[&str], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, v| Formula::exists(v, acc))
    }

    /// Conjunction of `parts`; `True` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut iter = parts.into_iter();
        match iter.next() {
            None => Formula::True,
            Some(first) => iter.fold(first, Formula::and),
        }
    }

    /// Disjunction of `parts`; `False` when empty.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut iter = parts.into_iter();
        match iter.next() {
            None => Formula::False,
            Some(first) => iter.fold(first, Formula::or),
        }
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(..) | Formula::Equals(..) | Formula::True | Formula::False => vec![],
            Formula::Not(a) | Formula::ForAll(_, a) | Formula::Exists(_, a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => vec![a, b],
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        let mut note = |v: &'a str, bound: &Vec<&'a str>| {
            if !bound.contains(&v) {
                out.insert(v.to_string());
            }
        };
        match self {
            Formula::Atom(_, args) => {
                for a in args {
                    note(a, bound);
                }
            }
            Formula::Equals(a, b) => {
                note(a, bound);
                note(b, bound);
            }
            Formula::True | Formula::False => {}
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                bound.push(v);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Maximum quantifier nesting depth.
    pub fn quantifier_rank(&self) -> usize {
        match self {
            Formula::ForAll(_, b) | Formula::Exists(_, b) => 1 + b.quantifier_rank(),
            other => other
                .children()
                .into_iter()
                .map(Formula::quantifier_rank)
                .max()
                .unwrap_or(0),
        }
    }

    pub fn uses_equality(&self) -> bool {
        match self {
            Formula::Equals(..) => true,
            other => other.children().into_iter().any(Formula::uses_equality),
        }
    }

    pub fn has_quantifiers(&self) -> bool {
        match self {
            Formula::ForAll(..) | Formula::Exists(..) => true,
            other => other.children().into_iter().any(Formula::has_quantifiers),
        }
    }

    /// Relation symbols with the arities they are used at. The first
    /// conflicting use is reported as an arity clash.
    pub fn vocabulary(&self) -> Result<Signature> {
        let mut sig = Signature::new().with_equality(self.uses_equality());
        self.collect_symbols(&mut sig)?;
        Ok(sig)
    }

    fn collect_symbols(&self, sig: &mut Signature) -> Result<()> {
        if let Formula::Atom(name, args) = self {
            sig.add_symbol(name, args.len())?;
        }
        for c in self.children() {
            c.collect_symbols(sig)?;
        }
        Ok(())
    }

    /// Set of relation names used.
    pub fn relation_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |name, _| {
            out.insert(name.to_string());
        });
        out
    }

    fn visit_atoms(&self, f: &mut dyn FnMut(&str, &[String])) {
        if let Formula::Atom(name, args) = self {
            f(name, args);
        }
        for c in self.children() {
            c.visit_atoms(f);
        }
    }

    /// Replaces every atom `from(..)` with `to(..)`.
    pub fn rename_relation(&self, from: &str, to: &str) -> Formula {
        self.map_atoms(&|name, args| {
            let name = if name == from { to } else { name };
            Formula::Atom(name.to_string(), args.to_vec())
        })
    }

    /// Rebuilds the formula with every atom passed through `f`.
    pub fn map_atoms(&self, f: &dyn Fn(&str, &[String]) -> Formula) -> Formula {
        let bx = |g: &Formula| Box::new(g.map_atoms(f));
        match self {
            Formula::Atom(name, args) => f(name, args),
            Formula::Equals(..) | Formula::True | Formula::False => self.clone(),
            Formula::Not(a) => Formula::Not(bx(a)),
            Formula::And(a, b) => Formula::And(bx(a), bx(b)),
            Formula::Or(a, b) => Formula::Or(bx(a), bx(b)),
            Formula::Implies(a, b) => Formula::Implies(bx(a), bx(b)),
            Formula::Iff(a, b) => Formula::Iff(bx(a), bx(b)),
            Formula::ForAll(v, a) => Formula::ForAll(v.clone(), bx(a)),
            Formula::Exists(v, a) => Formula::Exists(v.clone(), bx(a)),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::pretty_print(self))
    }
}

/// Ordered list of sentences plus the signature they live in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    sentences: Vec<Formula>,
    signature: Signature,
}

impl Default for Theory {
    fn default() -> Self {
        Theory::new()
    }
}

impl Theory {
    pub fn new() -> Self {
        Theory {
            sentences: Vec::new(),
            signature: Signature::new(),
        }
    }

    /// An empty theory over `signature`, which may declare symbols that no
    /// sentence mentions.
    pub fn over(signature: Signature) -> Self {
        Theory {
            sentences: Vec::new(),
            signature,
        }
    }

    /// Builds a theory with equality enabled.
    pub fn from_sentences<I: IntoIterator<Item = Formula>>(sentences: I) -> Result<Self> {
        let mut t = Theory::new();
        for s in sentences {
            t.push(s)?;
        }
        Ok(t)
    }

    pub fn push(&mut self, sentence: Formula) -> Result<()> {
        if let Some(var) = sentence.free_vars().into_iter().next() {
            return Err(Error::FreeVariable(var));
        }
        let vocab = sentence.vocabulary()?;
        for (name, arity) in vocab.symbols() {
            self.signature.add_symbol(name, arity)?;
        }
        if vocab.equality_enabled() && !self.signature.equality_enabled() {
            return Err(Error::EqualityNotEnabled);
        }
        self.sentences.push(sentence);
        Ok(())
    }

    pub fn set_equality(&mut self, enabled: bool) -> Result<()> {
        if !enabled && self.sentences.iter().any(Formula::uses_equality) {
            return Err(Error::EqualityNotEnabled);
        }
        self.signature.set_equality(enabled);
        Ok(())
    }

    pub fn add_functional(&mut self, name: &str, output: usize) -> Result<()> {
        self.signature.add_functional(name, output)
    }

    pub fn sentences(&self) -> &[Formula] {
        &self.sentences
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// A copy of this theory with one more sentence.
    pub fn with(&self, sentence: Formula) -> Result<Theory> {
        let mut t = self.clone();
        t.push(sentence)?;
        Ok(t)
    }

    /// Concatenation; signatures are merged.
    pub fn extend(&self, other: &Theory) -> Result<Theory> {
        let mut t = self.clone();
        t.signature = t.signature.union(&other.signature)?;
        for s in &other.sentences {
            t.push(s.clone())?;
        }
        Ok(t)
    }

    /// Conjunction of all members.
    pub fn conjunction(&self) -> Formula {
        Formula::conjunction(self.sentences.iter().cloned())
    }
}

/// Vocabulary of a formula; shorthand for [`Formula::vocabulary`].
pub fn vocabulary(f: &Formula) -> Result<Signature> {
    f.vocabulary()
}
