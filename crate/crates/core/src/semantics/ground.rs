//! Grounding of sentences over a fixed finite domain into clauses over
//! finite-domain variables.
//!
//! Every relation becomes a block of variables. A relation with a
//! functional hint gets one variable per assignment of its input
//! coordinates, ranging over the domain; any other relation gets one
//! boolean variable per tuple. A literal says a variable does or does not
//! take a value.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::structure::{index_tuple, table_len, tuple_index, FiniteStructure};
use crate::syntax::{Formula, Signature};

pub const MAX_DOMAIN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    pub var: u32,
    pub val: u8,
    pub pos: bool,
}

impl Lit {
    pub fn negate(self) -> Lit {
        Lit { pos: !self.pos, ..self }
    }

    /// Truth under the domain `dom` of its variable, if already decided.
    pub fn value(self, dom: u64) -> Option<bool> {
        let bit = 1u64 << self.val;
        let holds = if dom & bit == 0 {
            Some(false)
        } else if dom == bit {
            Some(true)
        } else {
            None
        };
        holds.map(|h| h == self.pos)
    }
}

#[derive(Debug, Clone)]
pub struct RelInfo {
    pub name: String,
    pub arity: usize,
    pub functional: Option<usize>,
    pub first_var: usize,
    pub vars: usize,
}

/// Assignment of solver variables to relation entries.
#[derive(Debug, Clone)]
pub struct Layout {
    pub n: usize,
    pub signature: Signature,
    pub rels: Vec<RelInfo>,
    pub rel_ids: BTreeMap<String, usize>,
    pub struct_vars: usize,
    /// Largest domain element named by each structure variable's position.
    pub max_arg: Vec<i64>,
    pub functional: Vec<bool>,
}

impl Layout {
    pub fn new(signature: &Signature, n: usize) -> Result<Layout> {
        if n == 0 {
            return Err(Error::EmptyDomain);
        }
        if n > MAX_DOMAIN {
            return Err(Error::InvalidConfig(format!(
                "domain size {n} exceeds the model finder's limit of {MAX_DOMAIN}"
            )));
        }
        let mut rels = Vec::new();
        let mut rel_ids = BTreeMap::new();
        let mut max_arg = Vec::new();
        let mut functional = Vec::new();
        for (name, arity) in signature.symbols() {
            let hint = signature.functional_output(name);
            let first_var = max_arg.len();
            let vars = match hint {
                Some(k) => {
                    let cells = table_len(n, arity - 1);
                    for c in 0..cells {
                        let args = index_tuple(n, arity - 1, c);
                        max_arg.push(args.iter().max().map_or(-1, |&m| m as i64));
                        functional.push(true);
                    }
                    let _ = k;
                    cells
                }
                None => {
                    let cells = table_len(n, arity);
                    for c in 0..cells {
                        let args = index_tuple(n, arity, c);
                        max_arg.push(args.iter().max().map_or(-1, |&m| m as i64));
                        functional.push(false);
                    }
                    cells
                }
            };
            rel_ids.insert(name.to_string(), rels.len());
            rels.push(RelInfo {
                name: name.to_string(),
                arity,
                functional: hint,
                first_var,
                vars,
            });
        }
        Ok(Layout {
            n,
            signature: signature.clone(),
            struct_vars: max_arg.len(),
            rels,
            rel_ids,
            max_arg,
            functional,
        })
    }

    pub fn full_domain(&self, var: usize) -> u64 {
        if var < self.struct_vars && self.functional[var] {
            if self.n == 64 {
                u64::MAX
            } else {
                (1u64 << self.n) - 1
            }
        } else {
            0b11
        }
    }

    pub fn atom_lit(&self, rel: usize, args: &[usize], pos: bool) -> Lit {
        let info = &self.rels[rel];
        match info.functional {
            Some(k) => {
                let mut inputs = args.to_vec();
                let out = inputs.remove(k);
                Lit {
                    var: (info.first_var + tuple_index(self.n, &inputs)) as u32,
                    val: out as u8,
                    pos,
                }
            }
            None => Lit {
                var: (info.first_var + tuple_index(self.n, args)) as u32,
                val: 1,
                pos,
            },
        }
    }

    /// Reads a structure off fully decided domains.
    pub fn extract(&self, dom: &[u64]) -> FiniteStructure {
        let n = self.n;
        let mut tables = BTreeMap::new();
        for info in &self.rels {
            let mut t = vec![false; table_len(n, info.arity)];
            for c in 0..info.vars {
                let d = dom[info.first_var + c];
                match info.functional {
                    Some(k) => {
                        let v = d.trailing_zeros() as usize;
                        let mut args = index_tuple(n, info.arity - 1, c);
                        args.insert(k, v);
                        t[tuple_index(n, &args)] = true;
                    }
                    None => t[c] = d == 0b10,
                }
            }
            tables.insert(info.name.clone(), t);
        }
        FiniteStructure::from_tables(self.signature.clone(), n, tables)
    }
}

/// Fixed truth values for some atoms, applied before search.
#[derive(Debug, Clone, Default)]
pub struct Pins {
    pub tables: BTreeMap<String, Vec<Option<bool>>>,
    /// Elements at or above this index are not mentioned by any pin except
    /// uniformly, so they may be treated as interchangeable.
    pub symmetric_from: usize,
}

impl Pins {
    /// Pins every atom of `a`'s relations on the domain `0..a.size()`,
    /// inside a domain of size `n`. With `outside_false`, atoms of those
    /// relations that leave the prefix are pinned false.
    pub fn prefix(a: &FiniteStructure, n: usize, outside_false: bool) -> Pins {
        let m = a.size();
        let mut tables = BTreeMap::new();
        for (name, arity) in a.signature().symbols() {
            let small = a.table(name).expect("table per symbol");
            let t = (0..table_len(n, arity))
                .map(|idx| {
                    let tuple = index_tuple(n, arity, idx);
                    if tuple.iter().all(|&e| e < m) {
                        Some(small[tuple_index(m, &tuple)])
                    } else if outside_false {
                        Some(false)
                    } else {
                        None
                    }
                })
                .collect();
            tables.insert(name.to_string(), t);
        }
        Pins {
            tables,
            symmetric_from: m,
        }
    }
}

/// Negation normal form with variables resolved to slots.
#[derive(Debug, Clone)]
enum Nnf {
    Atom { rel: usize, args: Vec<usize>, pos: bool },
    Eq { a: usize, b: usize, pos: bool },
    Const(bool),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
    All(usize, Box<Nnf>),
    Ex(usize, Box<Nnf>),
}

struct NnfBuilder<'a> {
    layout: &'a Layout,
    scope: Vec<(&'a str, usize)>,
    slots: usize,
}

impl<'a> NnfBuilder<'a> {
    fn slot(&self, v: &str) -> Result<usize> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| *n == v)
            .map(|&(_, s)| s)
            .ok_or_else(|| Error::UnboundVariable(v.to_string()))
    }

    fn build(&mut self, f: &'a Formula, pos: bool) -> Result<Nnf> {
        Ok(match f {
            Formula::Atom(name, args) => {
                let rel = *self
                    .layout
                    .rel_ids
                    .get(name)
                    .filter(|&&r| self.layout.rels[r].arity == args.len())
                    .ok_or_else(|| Error::VocabularyNotContained(name.clone()))?;
                let args = args.iter().map(|a| self.slot(a)).collect::<Result<_>>()?;
                Nnf::Atom { rel, args, pos }
            }
            Formula::Equals(a, b) => Nnf::Eq {
                a: self.slot(a)?,
                b: self.slot(b)?,
                pos,
            },
            Formula::True => Nnf::Const(pos),
            Formula::False => Nnf::Const(!pos),
            Formula::Not(a) => self.build(a, !pos)?,
            Formula::And(a, b) | Formula::Or(a, b) => {
                let parts = vec![self.build(a, pos)?, self.build(b, pos)?];
                if matches!(f, Formula::And(..)) == pos {
                    Nnf::And(parts)
                } else {
                    Nnf::Or(parts)
                }
            }
            Formula::Implies(a, b) => {
                let parts = vec![self.build(a, !pos)?, self.build(b, pos)?];
                if pos {
                    Nnf::Or(parts)
                } else {
                    Nnf::And(parts)
                }
            }
            Formula::Iff(a, b) => {
                let (ap, an) = (self.build(a, true)?, self.build(a, false)?);
                let (bp, bn) = (self.build(b, true)?, self.build(b, false)?);
                if pos {
                    Nnf::And(vec![Nnf::Or(vec![an, bp]), Nnf::Or(vec![ap, bn])])
                } else {
                    Nnf::And(vec![Nnf::Or(vec![ap, bp]), Nnf::Or(vec![an, bn])])
                }
            }
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                let slot = self.slots;
                self.slots += 1;
                self.scope.push((v, slot));
                let inner = Box::new(self.build(body, pos)?);
                self.scope.pop();
                if matches!(f, Formula::ForAll(..)) == pos {
                    Nnf::All(slot, inner)
                } else {
                    Nnf::Ex(slot, inner)
                }
            }
        })
    }
}

/// Ground formula after constant folding.
enum G {
    T,
    F,
    L(Lit),
    And(Vec<G>),
    Or(Vec<G>),
}

/// Clause database plus variable domains, ready for search.
pub struct Cnf {
    pub layout: Layout,
    pub domains: Vec<u64>,
    pub lits: Vec<Lit>,
    pub clauses: Vec<(u32, u32)>,
    pub unsat: bool,
}

impl Cnf {
    pub fn new(layout: Layout, pins: Option<&Pins>) -> Result<Cnf> {
        let domains = (0..layout.struct_vars).map(|v| layout.full_domain(v)).collect();
        let mut cnf = Cnf {
            layout,
            domains,
            lits: Vec::new(),
            clauses: Vec::new(),
            unsat: false,
        };
        if let Some(p) = pins {
            cnf.apply_pins(p)?;
        }
        Ok(cnf)
    }

    fn apply_pins(&mut self, pins: &Pins) -> Result<()> {
        let n = self.layout.n;
        for (name, table) in &pins.tables {
            let rel = *self
                .layout
                .rel_ids
                .get(name)
                .ok_or_else(|| Error::VocabularyNotContained(name.clone()))?;
            let arity = self.layout.rels[rel].arity;
            for (idx, pin) in table.iter().enumerate() {
                if let Some(value) = *pin {
                    let lit = self.layout.atom_lit(rel, &index_tuple(n, arity, idx), value);
                    let d = &mut self.domains[lit.var as usize];
                    let bit = 1u64 << lit.val;
                    *d = if lit.pos { *d & bit } else { *d & !bit };
                    if *d == 0 {
                        self.unsat = true;
                    }
                }
            }
        }
        Ok(())
    }

    fn is_bool(&self, var: u32) -> bool {
        let v = var as usize;
        v >= self.layout.struct_vars || !self.layout.functional[v]
    }

    fn new_aux(&mut self) -> u32 {
        self.domains.push(0b11);
        (self.domains.len() - 1) as u32
    }

    fn canonical(&self, l: Lit) -> Lit {
        if self.is_bool(l.var) && l.val == 0 {
            Lit {
                var: l.var,
                val: 1,
                pos: !l.pos,
            }
        } else {
            l
        }
    }

    /// Adds a clause after simplification against the initial domains.
    pub fn add_clause(&mut self, raw: Vec<Lit>) {
        if self.unsat {
            return;
        }
        let mut lits = Vec::with_capacity(raw.len());
        for l in raw {
            let l = self.canonical(l);
            match l.value(self.domains[l.var as usize]) {
                Some(true) => return,
                Some(false) => {}
                None => lits.push(l),
            }
        }
        lits.sort_unstable();
        lits.dedup();
        // Within one variable: pos(a), neg(a) is a tautology, as is
        // neg(a), neg(b); a neg(b) subsumes every pos(a) with a ≠ b; and
        // positives covering the whole domain are a tautology.
        let mut out = Vec::with_capacity(lits.len());
        let mut i = 0;
        while i < lits.len() {
            let var = lits[i].var;
            let mut j = i;
            while j < lits.len() && lits[j].var == var {
                j += 1;
            }
            let group = &lits[i..j];
            let negs: Vec<&Lit> = group.iter().filter(|l| !l.pos).collect();
            match negs.len() {
                0 => {
                    let covered = group.iter().fold(0u64, |m, l| m | (1 << l.val));
                    if self.domains[var as usize] & !covered == 0 {
                        return;
                    }
                    out.extend_from_slice(group);
                }
                1 => {
                    let b = negs[0].val;
                    if group.iter().any(|l| l.pos && l.val == b) {
                        return;
                    }
                    out.push(*negs[0]);
                }
                _ => return,
            }
            i = j;
        }
        if out.is_empty() {
            self.unsat = true;
            return;
        }
        if out.len() == 1 {
            // Unit clauses go straight into the domains.
            let l = out[0];
            let d = &mut self.domains[l.var as usize];
            let bit = 1u64 << l.val;
            *d = if l.pos { *d & bit } else { *d & !bit };
            if *d == 0 {
                self.unsat = true;
            }
            return;
        }
        let start = self.lits.len() as u32;
        self.lits.extend_from_slice(&out);
        self.clauses.push((start, out.len() as u32));
    }

    /// Grounds `sentence` over the domain and adds its clauses.
    pub fn add_sentence(&mut self, sentence: &Formula) -> Result<()> {
        let mut b = NnfBuilder {
            layout: &self.layout,
            scope: Vec::new(),
            slots: 0,
        };
        let nnf = b.build(sentence, true)?;
        let mut env = vec![0usize; b.slots];
        self.emit(&nnf, &mut env);
        Ok(())
    }

    fn emit(&mut self, f: &Nnf, env: &mut Vec<usize>) {
        if self.unsat {
            return;
        }
        match f {
            Nnf::All(slot, body) => {
                for e in 0..self.layout.n {
                    env[*slot] = e;
                    self.emit(body, env);
                }
            }
            Nnf::And(parts) => {
                for p in parts {
                    self.emit(p, env);
                }
            }
            _ => {
                let g = self.ground(f, env);
                self.add_ground(g);
            }
        }
    }

    fn ground(&self, f: &Nnf, env: &mut Vec<usize>) -> G {
        match f {
            Nnf::Atom { rel, args, pos } => {
                let tuple: Vec<usize> = args.iter().map(|&s| env[s]).collect();
                let lit = self.canonical(self.layout.atom_lit(*rel, &tuple, *pos));
                match lit.value(self.domains[lit.var as usize]) {
                    Some(true) => G::T,
                    Some(false) => G::F,
                    None => G::L(lit),
                }
            }
            Nnf::Eq { a, b, pos } => {
                if (env[*a] == env[*b]) == *pos {
                    G::T
                } else {
                    G::F
                }
            }
            Nnf::Const(b) => {
                if *b {
                    G::T
                } else {
                    G::F
                }
            }
            Nnf::And(parts) => fold_and(parts.iter().map(|p| self.ground(p, env))),
            Nnf::Or(parts) => fold_or(parts.iter().map(|p| self.ground(p, env))),
            Nnf::All(slot, body) => {
                let mut out = Vec::new();
                for e in 0..self.layout.n {
                    env[*slot] = e;
                    match self.ground(body, env) {
                        G::T => {}
                        G::F => return G::F,
                        g => out.push(g),
                    }
                }
                fold_and(out.into_iter())
            }
            Nnf::Ex(slot, body) => {
                let mut out = Vec::new();
                for e in 0..self.layout.n {
                    env[*slot] = e;
                    match self.ground(body, env) {
                        G::F => {}
                        G::T => return G::T,
                        g => out.push(g),
                    }
                }
                fold_or(out.into_iter())
            }
        }
    }

    fn add_ground(&mut self, g: G) {
        match g {
            G::T => {}
            G::F => self.unsat = true,
            G::L(l) => self.add_clause(vec![l]),
            G::And(parts) => {
                for p in parts {
                    self.add_ground(p);
                }
            }
            G::Or(parts) => {
                let lits = parts.into_iter().map(|p| self.lit_of(p)).collect();
                self.add_clause(lits);
            }
        }
    }

    /// A literal equivalent to `g`, introducing a defined auxiliary
    /// variable for compound subformulas.
    fn lit_of(&mut self, g: G) -> Lit {
        match g {
            G::L(l) => l,
            G::And(parts) | G::Or(parts) if parts.is_empty() => unreachable!("folded"),
            G::And(parts) => {
                let ls: Vec<Lit> = parts.into_iter().map(|p| self.lit_of(p)).collect();
                let x = self.aux_lit();
                for &l in &ls {
                    self.add_clause(vec![x.negate(), l]);
                }
                let mut big: Vec<Lit> = ls.iter().map(|l| l.negate()).collect();
                big.push(x);
                self.add_clause(big);
                x
            }
            G::Or(parts) => {
                let ls: Vec<Lit> = parts.into_iter().map(|p| self.lit_of(p)).collect();
                let x = self.aux_lit();
                for &l in &ls {
                    self.add_clause(vec![x, l.negate()]);
                }
                let mut big = ls;
                big.push(x.negate());
                self.add_clause(big);
                x
            }
            G::T | G::F => unreachable!("constants are folded before clausification"),
        }
    }

    fn aux_lit(&mut self) -> Lit {
        Lit {
            var: self.new_aux(),
            val: 1,
            pos: true,
        }
    }
}

fn fold_and(parts: impl Iterator<Item = G>) -> G {
    let mut out = Vec::new();
    for p in parts {
        match p {
            G::T => {}
            G::F => return G::F,
            G::And(inner) => out.extend(inner),
            g => out.push(g),
        }
    }
    match out.len() {
        0 => G::T,
        1 => out.pop().expect("one part"),
        _ => G::And(out),
    }
}

fn fold_or(parts: impl Iterator<Item = G>) -> G {
    let mut out = Vec::new();
    for p in parts {
        match p {
            G::F => {}
            G::T => return G::T,
            G::Or(inner) => out.extend(inner),
            g => out.push(g),
        }
    }
    match out.len() {
        0 => G::F,
        1 => out.pop().expect("one part"),
        _ => G::Or(out),
    }
}
