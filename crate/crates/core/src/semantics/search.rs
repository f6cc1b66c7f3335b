//! Backtracking search over finite-domain variables with two-watched-literal
//! propagation and the least-number symmetry heuristic for functional cells.

use crate::error::{Error, Result};
use crate::structure::FiniteStructure;

use super::ground::{Cnf, Layout, Lit};

pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

/// Variable and value ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchOrder {
    /// Smallest remaining domain first.
    #[default]
    FirstFail,
    /// Relation entries in layout order, values ascending. The first model
    /// found is then the least one in that order.
    Static,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of branching decisions per call.
    pub node_budget: u64,
    pub order: SearchOrder,
    /// Skip values of functional cells that are interchangeable with a
    /// smaller untouched element.
    pub symmetry_breaking: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            node_budget: DEFAULT_NODE_BUDGET,
            order: SearchOrder::FirstFail,
            symmetry_breaking: true,
        }
    }
}

impl SearchOptions {
    pub fn with_budget(budget: u64) -> Self {
        SearchOptions {
            node_budget: budget,
            ..SearchOptions::default()
        }
    }

    /// Options for deterministic least-first search.
    pub fn ordered(self) -> Self {
        SearchOptions {
            order: SearchOrder::Static,
            symmetry_breaking: false,
            ..self
        }
    }
}

struct Level {
    trail_len: usize,
    var: u32,
    val: u8,
    mdn_before: i64,
}

pub struct Solver {
    layout: Layout,
    dom: Vec<u64>,
    lits: Vec<Lit>,
    clauses: Vec<(u32, u32)>,
    watches: Vec<Vec<u32>>,
    width: usize,
    trail: Vec<(u32, u64)>,
    levels: Vec<Level>,
    queue: Vec<(u32, u64, u64)>,
    qhead: usize,
    mdn: i64,
    root_conflict: bool,
    opts: SearchOptions,
    pub nodes: u64,
}

impl Solver {
    pub fn new(cnf: Cnf, symmetric_from: usize, opts: SearchOptions) -> Solver {
        let width = cnf.layout.n.max(2);
        let nvars = cnf.domains.len();
        let mut s = Solver {
            layout: cnf.layout,
            dom: cnf.domains,
            lits: cnf.lits,
            clauses: cnf.clauses,
            watches: vec![Vec::new(); nvars * width * 2],
            width,
            trail: Vec::new(),
            levels: Vec::new(),
            queue: Vec::new(),
            qhead: 0,
            mdn: symmetric_from as i64 - 1,
            root_conflict: cnf.unsat,
            opts,
            nodes: 0,
        };
        if !s.root_conflict {
            s.root_conflict = !s.init_watches();
        }
        s
    }

    fn key(&self, l: Lit) -> usize {
        ((l.var as usize * self.width) + l.val as usize) * 2 + l.pos as usize
    }

    fn value(&self, l: Lit) -> Option<bool> {
        l.value(self.dom[l.var as usize])
    }

    fn init_watches(&mut self) -> bool {
        for ci in 0..self.clauses.len() {
            let (start, len) = self.clauses[ci];
            let (start, len) = (start as usize, len as usize);
            let mut satisfied = false;
            let mut front = 0;
            for k in 0..len {
                match self.value(self.lits[start + k]) {
                    Some(true) => {
                        satisfied = true;
                        self.lits.swap(start + front, start + k);
                        front += 1;
                    }
                    None => {
                        self.lits.swap(start + front, start + k);
                        front += 1;
                    }
                    Some(false) => {}
                }
            }
            if !satisfied {
                match front {
                    0 => return false,
                    1 => {
                        let l = self.lits[start];
                        if !self.make_true(l) {
                            return false;
                        }
                    }
                    _ => {}
                }
            }
            let k0 = self.key(self.lits[start]);
            let k1 = self.key(self.lits[start + 1]);
            self.watches[k0].push(ci as u32);
            self.watches[k1].push(ci as u32);
        }
        self.propagate()
    }

    fn restrict(&mut self, var: u32, new: u64) -> bool {
        let old = self.dom[var as usize];
        if new == old {
            return true;
        }
        self.trail.push((var, old));
        self.dom[var as usize] = new;
        self.queue.push((var, old, new));
        new != 0
    }

    fn make_true(&mut self, l: Lit) -> bool {
        let d = self.dom[l.var as usize];
        let bit = 1u64 << l.val;
        let new = if l.pos { d & bit } else { d & !bit };
        self.restrict(l.var, new)
    }

    fn propagate(&mut self) -> bool {
        while self.qhead < self.queue.len() {
            let (var, old, new) = self.queue[self.qhead];
            self.qhead += 1;
            let mut removed = old & !new;
            while removed != 0 {
                let a = removed.trailing_zeros() as u8;
                removed &= removed - 1;
                let l = Lit { var, val: a, pos: true };
                if !self.falsified(l) {
                    return self.conflict();
                }
            }
            if new.count_ones() == 1 && old.count_ones() > 1 {
                let b = new.trailing_zeros() as u8;
                let l = Lit {
                    var,
                    val: b,
                    pos: false,
                };
                if !self.falsified(l) {
                    return self.conflict();
                }
            }
        }
        true
    }

    fn conflict(&mut self) -> bool {
        self.queue.clear();
        self.qhead = 0;
        false
    }

    /// Visits the clauses watching `lit`, which has just become false.
    fn falsified(&mut self, lit: Lit) -> bool {
        let key = self.key(lit);
        let mut ws = std::mem::take(&mut self.watches[key]);
        let mut ok = true;
        let mut i = 0;
        while i < ws.len() {
            let ci = ws[i] as usize;
            let (start, len) = self.clauses[ci];
            let (start, len) = (start as usize, len as usize);
            if self.lits[start] == lit {
                self.lits.swap(start, start + 1);
            }
            let first = self.lits[start];
            if self.value(first) == Some(true) {
                i += 1;
                continue;
            }
            let mut moved = false;
            for k in 2..len {
                let cand = self.lits[start + k];
                if self.value(cand) != Some(false) {
                    self.lits.swap(start + 1, start + k);
                    let nk = self.key(cand);
                    self.watches[nk].push(ci as u32);
                    ws.swap_remove(i);
                    moved = true;
                    break;
                }
            }
            if moved {
                continue;
            }
            if self.value(first) == Some(false) || !self.make_true(first) {
                ok = false;
                break;
            }
            i += 1;
        }
        let extra = std::mem::take(&mut self.watches[key]);
        ws.extend(extra);
        self.watches[key] = ws;
        ok
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let (v, old) = self.trail.pop().expect("trail entry");
            self.dom[v as usize] = old;
        }
        self.queue.clear();
        self.qhead = 0;
    }

    /// Pops decisions until refuting one leaves a consistent state.
    fn backtrack(&mut self) -> bool {
        while let Some(level) = self.levels.pop() {
            self.undo_to(level.trail_len);
            self.mdn = level.mdn_before;
            let d = self.dom[level.var as usize];
            if self.restrict(level.var, d & !(1u64 << level.val)) && self.propagate() {
                return true;
            }
            self.queue.clear();
            self.qhead = 0;
        }
        false
    }

    fn pick(&self) -> Option<u32> {
        let sv = self.layout.struct_vars;
        match self.opts.order {
            SearchOrder::Static => (0..sv).find(|&v| self.dom[v].count_ones() > 1).map(|v| v as u32),
            SearchOrder::FirstFail => (0..sv)
                .filter(|&v| self.dom[v].count_ones() > 1)
                .min_by_key(|&v| (self.dom[v].count_ones(), self.layout.max_arg[v], v))
                .map(|v| v as u32),
        }
    }

    fn decide(&mut self, var: u32, val: u8) -> bool {
        self.levels.push(Level {
            trail_len: self.trail.len(),
            var,
            val,
            mdn_before: self.mdn,
        });
        let v = var as usize;
        if v < self.layout.struct_vars {
            self.mdn = self.mdn.max(self.layout.max_arg[v]);
            if self.layout.functional[v] {
                self.mdn = self.mdn.max(val as i64);
            }
        }
        self.restrict(var, 1u64 << val) && self.propagate()
    }

    /// Runs the search, calling `on_model` for each model until it returns
    /// false or the space is exhausted.
    pub fn run(&mut self, mut on_model: impl FnMut(FiniteStructure) -> bool) -> Result<()> {
        if self.root_conflict {
            return Ok(());
        }
        let n = self.layout.n;
        loop {
            let var = match self.pick() {
                Some(v) => v,
                None => match (self.layout.struct_vars..self.dom.len()).find(|&v| self.dom[v].count_ones() > 1) {
                    Some(aux) => aux as u32,
                    None => {
                        if !on_model(self.layout.extract(&self.dom)) || !self.backtrack() {
                            return Ok(());
                        }
                        continue;
                    }
                },
            };
            self.nodes += 1;
            if self.nodes > self.opts.node_budget {
                return Err(Error::ResourceBudgetExceeded {
                    limit: self.opts.node_budget,
                });
            }
            let v = var as usize;
            if self.opts.symmetry_breaking && v < self.layout.struct_vars && self.layout.functional[v] {
                let limit = self.mdn.max(self.layout.max_arg[v]) + 1;
                if limit < n as i64 - 1 {
                    let mask = (1u64 << (limit + 1)) - 1;
                    let d = self.dom[v];
                    self.mdn = limit;
                    if !(self.restrict(var, d & mask) && self.propagate()) {
                        if !self.backtrack() {
                            return Ok(());
                        }
                        continue;
                    }
                }
            }
            let val = self.dom[v].trailing_zeros() as u8;
            if !self.decide(var, val) && !self.backtrack() {
                return Ok(());
            }
        }
    }
}
