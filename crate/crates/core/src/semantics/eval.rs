use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::structure::{tuple_index, FiniteStructure};
use crate::syntax::Formula;

/// Values of free variables.
pub type Assignment = BTreeMap<String, usize>;

/// Formula with variables resolved to slots and relations to tables.
enum Node<'a> {
    Atom(&'a [bool], Vec<usize>),
    Eq(usize, usize),
    Const(bool),
    Not(Box<Node<'a>>),
    And(Box<Node<'a>>, Box<Node<'a>>),
    Or(Box<Node<'a>>, Box<Node<'a>>),
    Implies(Box<Node<'a>>, Box<Node<'a>>),
    Iff(Box<Node<'a>>, Box<Node<'a>>),
    ForAll(usize, Box<Node<'a>>),
    Exists(usize, Box<Node<'a>>),
}

struct Compiler<'a, 'b> {
    s: &'a FiniteStructure,
    scope: Vec<(&'b str, usize)>,
    slots: usize,
}

impl<'a, 'b> Compiler<'a, 'b> {
    fn lookup(&self, v: &str) -> Result<usize> {
        self.scope
            .iter()
            .rev()
            .find(|(name, _)| *name == v)
            .map(|&(_, slot)| slot)
            .ok_or_else(|| Error::UnboundVariable(v.to_string()))
    }

    fn compile(&mut self, f: &'b Formula) -> Result<Node<'a>> {
        let bx = |n: Node<'a>| Box::new(n);
        Ok(match f {
            Formula::Atom(name, args) => {
                let table = self
                    .s
                    .table(name)
                    .filter(|_| self.s.signature().arity(name) == Some(args.len()))
                    .ok_or_else(|| Error::VocabularyNotContained(name.clone()))?;
                let slots = args.iter().map(|a| self.lookup(a)).collect::<Result<_>>()?;
                Node::Atom(table, slots)
            }
            Formula::Equals(a, b) => Node::Eq(self.lookup(a)?, self.lookup(b)?),
            Formula::True => Node::Const(true),
            Formula::False => Node::Const(false),
            Formula::Not(a) => Node::Not(bx(self.compile(a)?)),
            Formula::And(a, b) => Node::And(bx(self.compile(a)?), bx(self.compile(b)?)),
            Formula::Or(a, b) => Node::Or(bx(self.compile(a)?), bx(self.compile(b)?)),
            Formula::Implies(a, b) => Node::Implies(bx(self.compile(a)?), bx(self.compile(b)?)),
            Formula::Iff(a, b) => Node::Iff(bx(self.compile(a)?), bx(self.compile(b)?)),
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                let slot = self.slots;
                self.slots += 1;
                self.scope.push((v, slot));
                let inner = self.compile(body)?;
                self.scope.pop();
                if matches!(f, Formula::ForAll(..)) {
                    Node::ForAll(slot, bx(inner))
                } else {
                    Node::Exists(slot, bx(inner))
                }
            }
        })
    }
}

fn run(node: &Node<'_>, n: usize, env: &mut [usize], buf: &mut Vec<usize>) -> bool {
    match node {
        Node::Atom(table, args) => {
            buf.clear();
            buf.extend(args.iter().map(|&s| env[s]));
            table[tuple_index(n, buf)]
        }
        Node::Eq(a, b) => env[*a] == env[*b],
        Node::Const(b) => *b,
        Node::Not(a) => !run(a, n, env, buf),
        Node::And(a, b) => run(a, n, env, buf) && run(b, n, env, buf),
        Node::Or(a, b) => run(a, n, env, buf) || run(b, n, env, buf),
        Node::Implies(a, b) => !run(a, n, env, buf) || run(b, n, env, buf),
        Node::Iff(a, b) => run(a, n, env, buf) == run(b, n, env, buf),
        Node::ForAll(slot, body) => (0..n).all(|e| {
            env[*slot] = e;
            run(body, n, env, buf)
        }),
        Node::Exists(slot, body) => (0..n).any(|e| {
            env[*slot] = e;
            run(body, n, env, buf)
        }),
    }
}

/// A formula prepared for repeated evaluation in one structure.
pub struct CompiledFormula<'a> {
    root: Node<'a>,
    n: usize,
    free: Vec<String>,
    slots: usize,
}

impl<'a> CompiledFormula<'a> {
    /// Free variables, in the order `eval_with` expects their values.
    pub fn free_vars(&self) -> &[String] {
        &self.free
    }

    /// Evaluates with `values[i]` bound to `free_vars()[i]`.
    pub fn eval_with(&self, values: &[usize]) -> bool {
        assert_eq!(values.len(), self.free.len());
        let mut env = vec![0; self.slots];
        env[..values.len()].copy_from_slice(values);
        let mut buf = Vec::new();
        run(&self.root, self.n, &mut env, &mut buf)
    }
}

/// Checks vocabulary and compiles `f` against `a`. Free variables take the
/// first slots, in name order.
pub fn compile<'a>(a: &'a FiniteStructure, f: &'a Formula) -> Result<CompiledFormula<'a>> {
    let free: Vec<String> = f.free_vars().into_iter().collect();
    let (root, slots) = {
        let mut c = Compiler {
            s: a,
            scope: Vec::new(),
            slots: 0,
        };
        for v in &free {
            c.scope.push((v.as_str(), c.slots));
            c.slots += 1;
        }
        (c.compile(f)?, c.slots)
    };
    Ok(CompiledFormula {
        root,
        n: a.size(),
        free,
        slots,
    })
}

/// Tarskian truth of `f` in `a` under `asg`.
pub fn eval(a: &FiniteStructure, f: &Formula, asg: &Assignment) -> Result<bool> {
    let c = compile(a, f)?;
    let mut values = Vec::with_capacity(c.free.len());
    for v in &c.free {
        let &e = asg.get(v).ok_or_else(|| Error::UnboundVariable(v.clone()))?;
        if e >= a.size() {
            return Err(Error::ElementOutOfRange {
                element: e,
                size: a.size(),
            });
        }
        values.push(e);
    }
    Ok(c.eval_with(&values))
}

/// Truth of a sentence.
pub fn eval_sentence(a: &FiniteStructure, f: &Formula) -> Result<bool> {
    eval(a, f, &Assignment::new())
}

/// Whether `a` satisfies every sentence in `sentences`.
pub fn satisfies_all<'f, I>(a: &FiniteStructure, sentences: I) -> Result<bool>
where
    I: IntoIterator<Item = &'f Formula>,
{
    for s in sentences {
        if !eval_sentence(a, s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_structure};

    fn cycle() -> FiniteStructure {
        parse_structure(r#"{"domain_size":3,"relations":{"E":{"arity":2,"tuples":[[0,1],[1,2],[2,0]]}}}"#).unwrap()
    }

    #[test]
    fn spec_examples() {
        let total = parse_formula("forall x. exists y. E(x,y)", true).unwrap();
        assert!(eval_sentence(&cycle(), &total).unwrap());
        let path =
            parse_structure(r#"{"domain_size":3,"relations":{"E":{"arity":2,"tuples":[[0,1],[1,2]]}}}"#).unwrap();
        assert!(!eval_sentence(&path, &total).unwrap());
        assert!(eval_sentence(&path, &Formula::True).unwrap());
    }

    #[test]
    fn errors() {
        let open = parse_formula("E(x,y)", true).unwrap();
        assert!(matches!(eval_sentence(&cycle(), &open), Err(Error::UnboundVariable(_))));
        let mut asg = Assignment::new();
        asg.insert("x".into(), 0);
        asg.insert("y".into(), 1);
        assert!(eval(&cycle(), &open, &asg).unwrap());
        let p = parse_formula("exists x. P(x)", true).unwrap();
        assert!(matches!(
            eval_sentence(&cycle(), &p),
            Err(Error::VocabularyNotContained(_))
        ));
        let wrong_arity = parse_formula("exists x. E(x)", true).unwrap();
        assert!(eval_sentence(&cycle(), &wrong_arity).is_err());
    }

    #[test]
    fn shadowing_and_equality() {
        let f = parse_formula("exists x. forall x. (E(x,x) | x = x)", true).unwrap();
        assert!(eval_sentence(&cycle(), &f).unwrap());
        let g = parse_formula("exists x. exists y. (x != y & ~E(x,y) & ~E(y,x))", true).unwrap();
        assert!(!eval_sentence(&cycle(), &g).unwrap());
    }
}
