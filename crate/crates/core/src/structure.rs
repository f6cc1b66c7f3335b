//! Finite structures over relational signatures, and the relations between
//! structures that friendliness is parameterized by.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::Signature;

/// Relation required between a base model and its replacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BaseRelation {
    /// Identity.
    R1,
    /// Isomorphism.
    R2,
    /// Elementary embedding.
    R3,
    /// Elementary equivalence.
    R4,
}

impl BaseRelation {
    pub const ALL: [BaseRelation; 4] = [BaseRelation::R1, BaseRelation::R2, BaseRelation::R3, BaseRelation::R4];

    pub fn name(self) -> &'static str {
        match self {
            BaseRelation::R1 => "r1",
            BaseRelation::R2 => "r2",
            BaseRelation::R3 => "r3",
            BaseRelation::R4 => "r4",
        }
    }

    pub fn parse(s: &str) -> Option<BaseRelation> {
        BaseRelation::ALL.into_iter().find(|r| r.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for BaseRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Relation required between the replacement model and the final expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExpansionRelation {
    /// Same domain, old relations unchanged.
    S1,
    /// Domain may grow, old relations keep exactly their tuples.
    S2,
    /// Domain may grow, old relations unchanged on the old domain.
    S3,
}

impl ExpansionRelation {
    pub const ALL: [ExpansionRelation; 3] = [ExpansionRelation::S1, ExpansionRelation::S2, ExpansionRelation::S3];

    pub fn name(self) -> &'static str {
        match self {
            ExpansionRelation::S1 => "s1",
            ExpansionRelation::S2 => "s2",
            ExpansionRelation::S3 => "s3",
        }
    }

    pub fn parse(s: &str) -> Option<ExpansionRelation> {
        ExpansionRelation::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for ExpansionRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A structure with domain `{0, .., size-1}`.
///
/// Each relation is stored as a dense truth table indexed big-endian in the
/// tuple, so table order is lexicographic tuple order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteStructure {
    signature: Signature,
    size: usize,
    tables: BTreeMap<String, Vec<bool>>,
}

pub(crate) fn table_len(size: usize, arity: usize) -> usize {
    size.pow(arity as u32)
}

pub(crate) fn tuple_index(size: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &e| acc * size + e)
}

pub(crate) fn index_tuple(size: usize, arity: usize, mut index: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % size;
        index /= size;
    }
    out
}

impl FiniteStructure {
    /// Structure with every relation empty.
    pub fn new(signature: Signature, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyDomain);
        }
        let tables = signature
            .symbols()
            .map(|(name, arity)| (name.to_string(), vec![false; table_len(size, arity)]))
            .collect();
        Ok(FiniteStructure {
            signature,
            size,
            tables,
        })
    }

    /// A bare set of `size` elements over the empty signature with equality.
    ///
    /// # Panics
    /// If `size` is zero.
    pub fn bare(size: usize) -> Self {
        FiniteStructure::new(Signature::new(), size).expect("bare structure needs a positive size")
    }

    pub(crate) fn from_tables(signature: Signature, size: usize, tables: BTreeMap<String, Vec<bool>>) -> Self {
        debug_assert!(signature
            .symbols()
            .all(|(n, a)| tables.get(n).map(Vec::len) == Some(table_len(size, a))));
        debug_assert_eq!(tables.len(), signature.len());
        FiniteStructure {
            signature,
            size,
            tables,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Same interpretation with the signature's equality flag replaced.
    pub fn with_equality(mut self, enabled: bool) -> Self {
        self.signature.set_equality(enabled);
        self
    }

    /// Same interpretation with functional hints taken from `hints`
    /// wherever the symbol is present.
    pub fn with_hints_from(mut self, hints: &Signature) -> Result<Self> {
        for (name, k) in hints.functional_hints() {
            if self.signature.contains(name) {
                self.signature.add_functional(name, k)?;
            }
        }
        Ok(self)
    }

    pub fn table(&self, name: &str) -> Option<&[bool]> {
        self.tables.get(name).map(Vec::as_slice)
    }

    /// Whether `tuple` is in relation `name`. Unknown names and out-of-range
    /// tuples are simply false.
    pub fn holds(&self, name: &str, tuple: &[usize]) -> bool {
        match (self.tables.get(name), self.signature.arity(name)) {
            (Some(t), Some(a)) if a == tuple.len() && tuple.iter().all(|&e| e < self.size) => {
                t[tuple_index(self.size, tuple)]
            }
            _ => false,
        }
    }

    pub fn set(&mut self, name: &str, tuple: &[usize], value: bool) -> Result<()> {
        let arity = self
            .signature
            .arity(name)
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))?;
        if arity != tuple.len() {
            return Err(Error::ArityClash {
                name: name.to_string(),
                left: arity,
                right: tuple.len(),
            });
        }
        if let Some(&e) = tuple.iter().find(|&&e| e >= self.size) {
            return Err(Error::ElementOutOfRange {
                element: e,
                size: self.size,
            });
        }
        let idx = tuple_index(self.size, tuple);
        self.tables.get_mut(name).expect("table per symbol")[idx] = value;
        Ok(())
    }

    pub fn insert(&mut self, name: &str, tuple: &[usize]) -> Result<()> {
        self.set(name, tuple, true)
    }

    /// Tuples of `name` in lexicographic order.
    pub fn tuples<'a>(&'a self, name: &str) -> impl Iterator<Item = Vec<usize>> + 'a {
        let arity = self.signature.arity(name).unwrap_or(0);
        let size = self.size;
        self.tables
            .get(name)
            .into_iter()
            .flat_map(|t| t.iter().enumerate())
            .filter(|(_, &b)| b)
            .map(move |(i, _)| index_tuple(size, arity, i))
    }

    pub fn tuple_count(&self, name: &str) -> usize {
        self.tables.get(name).map_or(0, |t| t.iter().filter(|&&b| b).count())
    }

    /// True when every hinted relation is the graph of a total function.
    pub fn respects_functional_hints(&self) -> bool {
        self.signature.functional_hints().all(|(name, k)| {
            let arity = self.signature.arity(name).unwrap_or(0);
            let table = &self.tables[name];
            let n = self.size;
            (0..table_len(n, arity - 1)).all(|cell| {
                let mut args = index_tuple(n, arity - 1, cell);
                args.insert(k, 0);
                (0..n)
                    .filter(|&v| {
                        args[k] = v;
                        table[tuple_index(n, &args)]
                    })
                    .count()
                    == 1
            })
        })
    }

    /// Restriction to `sig`, which must be contained in the signature.
    pub fn reduct(&self, sig: &Signature) -> Result<FiniteStructure> {
        if !sig.is_subsignature_of(&self.signature) {
            return Err(Error::SignatureNotContained);
        }
        let tables = sig.names().map(|n| (n.to_string(), self.tables[n].clone())).collect();
        let mut out_sig = sig.clone();
        out_sig.set_equality(sig.equality_enabled());
        Ok(FiniteStructure::from_tables(out_sig, self.size, tables))
    }

    /// Same relations on the same domain, ignoring equality flag and hints.
    pub fn same_interpretation(&self, other: &FiniteStructure) -> bool {
        self.size == other.size && self.signature.same_symbols(&other.signature) && self.tables == other.tables
    }

    /// All expansions to `sig` on the same domain, in a fixed order.
    ///
    /// New symbols with a functional hint in `sig` range over total
    /// functions only; other new symbols range over all subsets.
    pub fn expansions(&self, sig: &Signature) -> Result<Expansions> {
        if !self.signature.is_subsignature_of(sig) {
            return Err(Error::SignatureNotContained);
        }
        let n = self.size;
        let mut slots = Vec::new();
        for (name, arity) in sig.symbols() {
            if self.signature.contains(name) {
                continue;
            }
            match sig.functional_output(name) {
                Some(k) => {
                    for cell in 0..table_len(n, arity - 1) {
                        let mut args = index_tuple(n, arity - 1, cell);
                        args.insert(k, 0);
                        let indices = (0..n)
                            .map(|v| {
                                args[k] = v;
                                tuple_index(n, &args)
                            })
                            .collect();
                        slots.push(Slot {
                            name: name.to_string(),
                            choices: indices,
                            functional: true,
                        });
                    }
                }
                None => {
                    for idx in 0..table_len(n, arity) {
                        slots.push(Slot {
                            name: name.to_string(),
                            choices: vec![idx],
                            functional: false,
                        });
                    }
                }
            }
        }
        let mut tables = self.tables.clone();
        for (name, arity) in sig.symbols() {
            tables
                .entry(name.to_string())
                .or_insert_with(|| vec![false; table_len(n, arity)]);
        }
        let digits = vec![0; slots.len()];
        Ok(Expansions {
            base: FiniteStructure::from_tables(sig.clone(), n, tables),
            slots,
            digits,
            done: false,
        })
    }

    /// Image of the structure under the bijection `i ↦ perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> FiniteStructure {
        assert_eq!(perm.len(), self.size);
        let n = self.size;
        let tables = self
            .tables
            .iter()
            .map(|(name, t)| {
                let arity = self.signature.arity(name).unwrap_or(0);
                let mut out = vec![false; t.len()];
                for (i, &b) in t.iter().enumerate() {
                    if b {
                        let img: Vec<usize> = index_tuple(n, arity, i).into_iter().map(|e| perm[e]).collect();
                        out[tuple_index(n, &img)] = true;
                    }
                }
                (name.clone(), out)
            })
            .collect();
        FiniteStructure::from_tables(self.signature.clone(), n, tables)
    }

    /// Lexicographically least image of the tables over all domain
    /// permutations; two structures are isomorphic iff their keys agree.
    /// Cost is `size!`, intended for small domains.
    pub fn canonical_key(&self) -> Vec<bool> {
        self.canonical_labeling().0
    }

    /// The canonical key together with a permutation whose image realizes it.
    pub fn canonical_labeling(&self) -> (Vec<bool>, Vec<usize>) {
        let n = self.size;
        let arities: Vec<usize> = self
            .tables
            .keys()
            .map(|k| self.signature.arity(k).unwrap_or(0))
            .collect();
        let mut best: Option<Vec<bool>> = None;
        let mut best_perm: Vec<usize> = (0..n).collect();
        let mut buf = Vec::new();
        for perm in (0..n).permutations(n) {
            // The key lists, for each table slot of the image in order, the
            // bit taken from the preimage tuple.
            let mut inv = vec![0; n];
            for (i, &p) in perm.iter().enumerate() {
                inv[p] = i;
            }
            buf.clear();
            let mut worse = false;
            let mut better = best.is_none();
            'tables: for (t, &arity) in self.tables.values().zip(&arities) {
                for idx in 0..t.len() {
                    let pre: Vec<usize> = index_tuple(n, arity, idx).into_iter().map(|e| inv[e]).collect();
                    let bit = t[tuple_index(n, &pre)];
                    if !better {
                        let cur = best.as_ref().expect("best set")[buf.len()];
                        if bit && !cur {
                            worse = true;
                            break 'tables;
                        }
                        if !bit && cur {
                            better = true;
                        }
                    }
                    buf.push(bit);
                }
            }
            if !worse && better {
                best = Some(buf.clone());
                best_perm = perm;
            }
        }
        (best.unwrap_or_default(), best_perm)
    }

    /// Per-element invariant used to prune isomorphism search: for every
    /// relation and every set of coordinates, the number of tuples in which
    /// the element occupies exactly those coordinates.
    fn degree_profile(&self) -> Vec<Vec<usize>> {
        let n = self.size;
        let mut prof = vec![Vec::new(); n];
        for (name, t) in &self.tables {
            let arity = self.signature.arity(name).unwrap_or(0);
            let width = 1usize << arity;
            let base = prof[0].len();
            for p in prof.iter_mut() {
                p.resize(base + width, 0);
            }
            for (i, &b) in t.iter().enumerate() {
                if !b {
                    continue;
                }
                let tuple = index_tuple(n, arity, i);
                for (e, p) in prof.iter_mut().enumerate() {
                    let mask = tuple
                        .iter()
                        .enumerate()
                        .filter(|&(_, &x)| x == e)
                        .fold(0usize, |m, (j, _)| m | (1 << j));
                    p[base + mask] += 1;
                }
            }
        }
        prof
    }

    /// A bijection `f` with `f(a) ≅ b`, mapping element `i` of `self` to
    /// `f[i]` of `other`.
    pub fn find_isomorphism(&self, other: &FiniteStructure) -> Result<Option<Vec<usize>>> {
        if !self.signature.same_symbols(&other.signature) {
            return Err(Error::SignatureMismatch);
        }
        if self.size != other.size {
            return Ok(None);
        }
        let pa = self.degree_profile();
        let pb = other.degree_profile();
        let mut sa = pa.clone();
        let mut sb = pb.clone();
        sa.sort();
        sb.sort();
        if sa != sb {
            return Ok(None);
        }
        // 0-ary relations are not covered by the profiles.
        for (name, t) in &self.tables {
            if self.signature.arity(name) == Some(0) && *t != other.tables[name] {
                return Ok(None);
            }
        }
        let candidates: Vec<Vec<usize>> = pa
            .iter()
            .map(|p| (0..other.size).filter(|&j| pb[j] == *p).collect())
            .collect();
        let mut map = Vec::with_capacity(self.size);
        let mut used = vec![false; other.size];
        if self.extend_iso(other, &candidates, &mut map, &mut used) {
            debug_assert!(self.permuted(&map).same_interpretation(other));
            Ok(Some(map))
        } else {
            Ok(None)
        }
    }

    fn extend_iso(
        &self,
        other: &FiniteStructure,
        candidates: &[Vec<usize>],
        map: &mut Vec<usize>,
        used: &mut [bool],
    ) -> bool {
        let i = map.len();
        if i == self.size {
            return true;
        }
        for &j in &candidates[i] {
            if used[j] {
                continue;
            }
            map.push(j);
            used[j] = true;
            if self.consistent_with(other, map) && self.extend_iso(other, candidates, map, used) {
                return true;
            }
            used[j] = false;
            map.pop();
        }
        false
    }

    /// Checks every tuple over the mapped prefix that involves its newest
    /// element.
    fn consistent_with(&self, other: &FiniteStructure, map: &[usize]) -> bool {
        let last = map.len() - 1;
        let m = map.len();
        for (name, t) in &self.tables {
            let arity = self.signature.arity(name).unwrap_or(0);
            if arity == 0 {
                continue;
            }
            let ot = &other.tables[name];
            for idx in 0..table_len(m, arity) {
                let tuple = index_tuple(m, arity, idx);
                if !tuple.contains(&last) {
                    continue;
                }
                let img: Vec<usize> = tuple.iter().map(|&e| map[e]).collect();
                if t[tuple_index(self.size, &tuple)] != ot[tuple_index(other.size, &img)] {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_isomorphic(&self, other: &FiniteStructure) -> Result<bool> {
        Ok(self.find_isomorphism(other)?.is_some())
    }

    /// Elementary equivalence of finite structures; with equality this
    /// coincides with isomorphism.
    pub fn elementarily_equivalent_finite(&self, other: &FiniteStructure) -> Result<bool> {
        if !self.signature.same_symbols(&other.signature) {
            return Err(Error::SignatureMismatch);
        }
        if !self.signature.equality_enabled() || !other.signature.equality_enabled() {
            return Err(Error::EqualityFreeUnsupported);
        }
        self.is_isomorphic(other)
    }

    /// Adds copies of `element` until the domain has `target` members. Each
    /// copy lies in exactly the tuples the original does.
    pub fn inflate(&self, target: usize, element: usize) -> Result<FiniteStructure> {
        if self.signature.equality_enabled() {
            return Err(Error::EqualityPresent);
        }
        if target < self.size {
            return Err(Error::TargetTooSmall {
                current: self.size,
                target,
            });
        }
        if element >= self.size {
            return Err(Error::ElementOutOfRange {
                element,
                size: self.size,
            });
        }
        let orig = |e: usize| if e < self.size { e } else { element };
        let tables = self
            .tables
            .iter()
            .map(|(name, t)| {
                let arity = self.signature.arity(name).unwrap_or(0);
                let out = (0..table_len(target, arity))
                    .map(|idx| {
                        let pre: Vec<usize> = index_tuple(target, arity, idx).into_iter().map(orig).collect();
                        t[tuple_index(self.size, &pre)]
                    })
                    .collect();
                (name.clone(), out)
            })
            .collect();
        Ok(FiniteStructure::from_tables(self.signature.clone(), target, tables))
    }
}

impl fmt::Display for FiniteStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "size {}", self.size)?;
        for name in self.signature.names() {
            let ts: Vec<String> = self.tuples(name).map(|t| format!("({})", t.iter().join(","))).collect();
            write!(f, "; {name} = {{{}}}", ts.join(", "))?;
        }
        Ok(())
    }
}

struct Slot {
    name: String,
    /// Table indices this slot controls. A plain bit slot has one index and
    /// two values; a functional cell has one index per possible output.
    choices: Vec<usize>,
    functional: bool,
}

impl Slot {
    fn radix(&self) -> usize {
        if self.functional {
            self.choices.len()
        } else {
            2
        }
    }
}

/// Iterator returned by [`FiniteStructure::expansions`].
pub struct Expansions {
    base: FiniteStructure,
    slots: Vec<Slot>,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for Expansions {
    type Item = FiniteStructure;

    fn next(&mut self) -> Option<FiniteStructure> {
        if self.done {
            return None;
        }
        let mut out = self.base.clone();
        for (slot, &d) in self.slots.iter().zip(&self.digits) {
            let table = out.tables.get_mut(&slot.name).expect("slot table");
            if slot.functional {
                table[slot.choices[d]] = true;
            } else {
                table[slot.choices[0]] = d == 1;
            }
        }
        // Little-endian increment over the last slot first, so the first
        // slot varies slowest.
        let mut i = self.slots.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.slots[i].radix() {
                break;
            }
            self.digits[i] = 0;
        }
        Some(out)
    }
}

/// Whether `a_dprime` stands in relation `s` to `a_prime`, with `a_prime`
/// occupying the initial segment of `a_dprime`'s domain.
pub fn check_s(s: ExpansionRelation, a_prime: &FiniteStructure, a_dprime: &FiniteStructure) -> Result<bool> {
    if !a_prime.signature.is_subsignature_of(&a_dprime.signature) {
        return Err(Error::SignatureNotContained);
    }
    let (m, n) = (a_prime.size, a_dprime.size);
    if m > n || (s == ExpansionRelation::S1 && m != n) {
        return Ok(false);
    }
    for (name, arity) in a_prime.signature.symbols() {
        let small = &a_prime.tables[name];
        let big = &a_dprime.tables[name];
        for (idx, &bit) in big.iter().enumerate() {
            let tuple = index_tuple(n, arity, idx);
            let inside = tuple.iter().all(|&e| e < m);
            let expected = inside && small[tuple_index(m, &tuple)];
            if (inside || s != ExpansionRelation::S3) && bit != expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether `r` holds between `a` and `a_prime`. With equality, elementary
/// embedding and elementary equivalence of finite structures both reduce
/// to isomorphism.
pub fn check_r(r: BaseRelation, a: &FiniteStructure, a_prime: &FiniteStructure) -> Result<bool> {
    match r {
        BaseRelation::R1 => {
            if !a.signature.same_symbols(&a_prime.signature) {
                return Err(Error::SignatureMismatch);
            }
            Ok(a.same_interpretation(a_prime))
        }
        BaseRelation::R2 => a.is_isomorphic(a_prime),
        BaseRelation::R3 | BaseRelation::R4 => a.elementarily_equivalent_finite(a_prime),
    }
}
