//! Concrete syntax for formulas, theory files and structure files.
//!
//! Formula grammar, loosest binding first:
//!
//! ```text
//! iff     := implies ( "<->" iff )?
//! implies := or ( "->" implies )?
//! or      := and ( "|" and )*
//! and     := unary ( "&" unary )*
//! unary   := "~" unary | ("forall" | "exists") var ("," var)* "." iff | primary
//! primary := "(" iff ")" | "true" | "false" | Rel [ "(" var ("," var)* ")" ]
//!          | var "=" var | var "!=" var
//! ```
//!
//! Relation names start with an uppercase letter, variables with a lowercase
//! one. A quantifier body runs as far right as possible.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::structure::FiniteStructure;
use crate::syntax::{Formula, Signature, Theory};

/// Location of a parse error. Offsets are bytes; line and column are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: SourceSpan, message: String },
    #[error("{span}: equality is not allowed in equality-free mode")]
    EqualityForbidden { span: SourceSpan },
    #[error("line {line}: free variable {var} in sentence")]
    FreeVariableInSentence { line: usize, var: String },
    #[error("relation {relation}: tuple {tuple:?} is outside a domain of size {domain_size}")]
    TupleOutOfRange {
        relation: String,
        tuple: Vec<usize>,
        domain_size: usize,
    },
    #[error("relation {relation}: expected arity {expected}, found a tuple of length {found}")]
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
}

impl ParseError {
    pub fn span(&self) -> Option<SourceSpan> {
        match self {
            ParseError::Syntax { span, .. } | ParseError::EqualityForbidden { span } => Some(*span),
            _ => None,
        }
    }

    fn shifted(self, offset: usize, line: usize) -> ParseError {
        let fix = |mut s: SourceSpan| {
            s.start += offset;
            s.end += offset;
            s.line = line;
            s
        };
        match self {
            ParseError::Syntax { span, message } => ParseError::Syntax {
                span: fix(span),
                message,
            },
            ParseError::EqualityForbidden { span } => ParseError::EqualityForbidden { span: fix(span) },
            other => other,
        }
    }
}

fn syntax(span: SourceSpan, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        span,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Upper(String),
    Lower(String),
    Forall,
    Exists,
    True,
    False,
    LParen,
    RParen,
    Comma,
    Dot,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Eq,
    Neq,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Upper(s) | Tok::Lower(s) => format!("`{s}`"),
            Tok::Forall => "`forall`".into(),
            Tok::Exists => "`exists`".into(),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Neq => "`!=`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    line_start: usize,
}

impl<'a> Lexer<'a> {
    fn span_from(&self, start: usize, line: usize, line_start: usize) -> SourceSpan {
        SourceSpan {
            start,
            end: self.pos,
            line,
            column: self.text[line_start..start].chars().count() + 1,
        }
    }

    fn tokenize(text: &'a str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
        let mut lx = Lexer {
            text,
            pos: 0,
            line: 1,
            line_start: 0,
        };
        let mut out = Vec::new();
        let bytes = text.as_bytes();
        loop {
            while lx.pos < bytes.len() && (bytes[lx.pos] as char).is_ascii_whitespace() {
                if bytes[lx.pos] == b'\n' {
                    lx.line += 1;
                    lx.line_start = lx.pos + 1;
                }
                lx.pos += 1;
            }
            let (start, line, line_start) = (lx.pos, lx.line, lx.line_start);
            let Some(c) = text[lx.pos..].chars().next() else {
                out.push((Tok::End, lx.span_from(start, line, line_start)));
                return Ok(out);
            };
            let rest = &text[lx.pos..];
            let (tok, len) = if rest.starts_with("<->") {
                (Tok::Iff, 3)
            } else if rest.starts_with("->") {
                (Tok::Implies, 2)
            } else if rest.starts_with("!=") {
                (Tok::Neq, 2)
            } else {
                match c {
                    '(' => (Tok::LParen, 1),
                    ')' => (Tok::RParen, 1),
                    ',' => (Tok::Comma, 1),
                    '.' => (Tok::Dot, 1),
                    '~' | '!' => (Tok::Not, 1),
                    '&' => (Tok::And, 1),
                    '|' => (Tok::Or, 1),
                    '=' => (Tok::Eq, 1),
                    c if c.is_ascii_alphabetic() => {
                        let len = rest
                            .char_indices()
                            .find(|&(_, ch)| !(ch.is_ascii_alphanumeric() || ch == '_' || ch == '\''))
                            .map(|(i, _)| i)
                            .unwrap_or(rest.len());
                        let word = &rest[..len];
                        let tok = match word {
                            "forall" => Tok::Forall,
                            "exists" => Tok::Exists,
                            "true" => Tok::True,
                            "false" => Tok::False,
                            w if c.is_ascii_uppercase() => Tok::Upper(w.to_string()),
                            w => Tok::Lower(w.to_string()),
                        };
                        (tok, len)
                    }
                    other => {
                        lx.pos += other.len_utf8();
                        return Err(syntax(
                            lx.span_from(start, line, line_start),
                            format!("unexpected character `{other}`"),
                        ));
                    }
                }
            };
            lx.pos += len;
            out.push((tok, lx.span_from(start, line, line_start)));
        }
    }
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    allow_equality: bool,
    depth: usize,
}

const MAX_NESTING: usize = 512;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<SourceSpan, ParseError> {
        if *self.peek() == want {
            Ok(self.bump().1)
        } else {
            Err(syntax(
                self.span(),
                format!("expected {}, found {}", want.describe(), self.peek().describe()),
            ))
        }
    }

    fn variable(&mut self) -> Result<String, ParseError> {
        match self.bump() {
            (Tok::Lower(v), _) => Ok(v),
            (t, span) => Err(syntax(span, format!("expected a variable, found {}", t.describe()))),
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(syntax(self.span(), "formula nested too deeply"));
        }
        Ok(())
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        self.enter()?;
        let lhs = self.implies()?;
        let out = if *self.peek() == Tok::Iff {
            self.bump();
            lhs.iff(self.iff()?)
        } else {
            lhs
        };
        self.depth -= 1;
        Ok(out)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        self.enter()?;
        let lhs = self.or()?;
        let out = if *self.peek() == Tok::Implies {
            self.bump();
            lhs.implies(self.implies()?)
        } else {
            lhs
        };
        self.depth -= 1;
        Ok(out)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        self.enter()?;
        let out = match self.peek() {
            Tok::Not => {
                self.bump();
                self.unary()?.not()
            }
            Tok::Forall | Tok::Exists => {
                let universal = *self.peek() == Tok::Forall;
                self.bump();
                let mut vars = vec![self.variable()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    vars.push(self.variable()?);
                }
                self.expect(Tok::Dot)?;
                let body = self.iff()?;
                vars.iter().rev().fold(body, |acc, v| {
                    if universal {
                        Formula::forall(v, acc)
                    } else {
                        Formula::exists(v, acc)
                    }
                })
            }
            _ => self.primary()?,
        };
        self.depth -= 1;
        Ok(out)
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let (tok, span) = self.bump();
        match tok {
            Tok::LParen => {
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::True => Ok(Formula::True),
            Tok::False => Ok(Formula::False),
            Tok::Upper(name) => {
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    if *self.peek() != Tok::RParen {
                        args.push(self.variable()?);
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            args.push(self.variable()?);
                        }
                    }
                    self.expect(Tok::RParen)?;
                }
                Ok(Formula::Atom(name, args))
            }
            Tok::Lower(lhs) => {
                let (op, op_span) = self.bump();
                let negated = match op {
                    Tok::Eq => false,
                    Tok::Neq => true,
                    other => {
                        return Err(syntax(
                            op_span,
                            format!("expected `=` after variable `{lhs}`, found {}", other.describe()),
                        ))
                    }
                };
                if !self.allow_equality {
                    return Err(ParseError::EqualityForbidden { span: op_span });
                }
                let rhs = self.variable()?;
                let eq = Formula::Equals(lhs, rhs);
                Ok(if negated { eq.not() } else { eq })
            }
            other => Err(syntax(span, format!("unexpected {}", other.describe()))),
        }
    }
}

/// Parses one formula. `with_equality = false` rejects `=` and `!=`.
pub fn parse_formula(text: &str, with_equality: bool) -> Result<Formula, ParseError> {
    let toks = Lexer::tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        allow_equality: with_equality,
        depth: 0,
    };
    let f = p.iff()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.span(), format!("unexpected {}", p.peek().describe())));
    }
    Ok(f)
}

/// Parses a sentence; free variables are an error.
pub fn parse_sentence(text: &str, with_equality: bool) -> Result<Formula, ParseError> {
    let f = parse_formula(text, with_equality)?;
    if let Some(var) = f.free_vars().into_iter().next() {
        return Err(ParseError::FreeVariableInSentence { line: 1, var });
    }
    Ok(f)
}

/// Parses a theory file.
///
/// One sentence per non-comment line. `#` starts a comment, except the
/// directives `#functional <Name> <output-index>` and `#no-equality`.
pub fn parse_theory(text: &str) -> Result<Theory, crate::Error> {
    parse_theory_with(text, true)
}

/// Like [`parse_theory`]; `with_equality = false` acts as a leading
/// `#no-equality`.
pub fn parse_theory_with(text: &str, mut with_equality: bool) -> Result<Theory, crate::Error> {
    let mut hints: Vec<(usize, String, usize)> = Vec::new();
    let mut offset = 0;
    let mut lines = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let content = raw.strip_suffix('\r').unwrap_or(raw);
        let trimmed = content.trim_start();
        let lead = content.len() - trimmed.len();
        if let Some(rest) = trimmed.strip_prefix("#functional") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let bad = || {
                syntax(
                    SourceSpan {
                        start: offset + lead,
                        end: offset + content.len(),
                        line: line_no,
                        column: lead + 1,
                    },
                    "expected `#functional <Name> <output-index>`",
                )
            };
            if parts.len() != 2 || !parts[0].starts_with(|c: char| c.is_ascii_uppercase()) {
                return Err(bad().into());
            }
            let k: usize = parts[1].parse().map_err(|_| bad())?;
            hints.push((line_no, parts[0].to_string(), k));
        } else if trimmed.starts_with("#no-equality") {
            with_equality = false;
        } else {
            let body = match content.find('#') {
                Some(i) => &content[..i],
                None => content,
            };
            if !body.trim().is_empty() {
                lines.push((line_no, offset, body));
            }
        }
        offset += raw.len() + 1;
    }

    let mut theory = Theory::new();
    theory.set_equality(with_equality)?;
    for (line_no, off, body) in lines {
        let f = parse_formula(body, with_equality).map_err(|e| e.shifted(off, line_no))?;
        if let Some(var) = f.free_vars().into_iter().next() {
            return Err(ParseError::FreeVariableInSentence { line: line_no, var }.into());
        }
        theory.push(f)?;
    }
    for (_, name, k) in hints {
        theory.add_functional(&name, k)?;
    }
    Ok(theory)
}

/// Parses `;`-separated sentences, as given inline on a command line.
pub fn parse_inline_theory(text: &str, with_equality: bool) -> Result<Theory, crate::Error> {
    let mut theory = Theory::new();
    theory.set_equality(with_equality)?;
    let mut offset = 0;
    for part in text.split(';') {
        if !part.trim().is_empty() {
            let f = parse_formula(part, with_equality).map_err(|e| e.shifted(offset, 1))?;
            if let Some(var) = f.free_vars().into_iter().next() {
                return Err(ParseError::FreeVariableInSentence { line: 1, var }.into());
            }
            theory.push(f)?;
        }
        offset += part.len() + 1;
    }
    Ok(theory)
}

/// Pretty-printing options.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PrettyOptions {
    /// Use logical symbols (`∀`, `∧`, ...) instead of ASCII. Output in this
    /// mode is for display only and does not re-parse.
    pub unicode: bool,
}

/// ASCII rendering that [`parse_formula`] reads back to the same tree.
pub fn pretty_print(f: &Formula) -> String {
    pretty_print_with(f, PrettyOptions::default())
}

pub fn pretty_print_with(f: &Formula, opts: PrettyOptions) -> String {
    let mut out = String::new();
    write_formula(f, 0, opts, &mut out);
    out
}

const P_IFF: u8 = 1;
const P_IMP: u8 = 2;
const P_OR: u8 = 3;
const P_AND: u8 = 4;
const P_UNARY: u8 = 5;

fn write_formula(f: &Formula, ctx: u8, o: PrettyOptions, out: &mut String) {
    let sym = |ascii: &'static str, uni: &'static str| if o.unicode { uni } else { ascii };
    let binary = |out: &mut String, a: &Formula, b: &Formula, op: &str, p: u8, left_assoc: bool| {
        let (lp, rp) = if left_assoc { (p, p + 1) } else { (p + 1, p) };
        let paren = ctx > p;
        if paren {
            out.push('(');
        }
        write_formula(a, lp, o, out);
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        write_formula(b, rp, o, out);
        if paren {
            out.push(')');
        }
    };
    match f {
        Formula::Atom(name, args) => {
            out.push_str(name);
            if !args.is_empty() {
                out.push('(');
                out.push_str(&args.join(","));
                out.push(')');
            }
        }
        Formula::Equals(a, b) => {
            out.push_str(a);
            out.push_str(" = ");
            out.push_str(b);
        }
        Formula::True => out.push_str(sym("true", "⊤")),
        Formula::False => out.push_str(sym("false", "⊥")),
        Formula::Not(a) => {
            out.push_str(sym("~", "¬"));
            write_formula(a, P_UNARY, o, out);
        }
        Formula::And(a, b) => binary(out, a, b, sym("&", "∧"), P_AND, true),
        Formula::Or(a, b) => binary(out, a, b, sym("|", "∨"), P_OR, true),
        Formula::Implies(a, b) => binary(out, a, b, sym("->", "→"), P_IMP, false),
        Formula::Iff(a, b) => binary(out, a, b, sym("<->", "↔"), P_IFF, false),
        Formula::ForAll(..) | Formula::Exists(..) => {
            // A quantifier body extends to the right, so any quantifier used
            // as an operand is parenthesized.
            let paren = ctx > 0;
            if paren {
                out.push('(');
            }
            let universal = matches!(f, Formula::ForAll(..));
            let mut vars = Vec::new();
            let mut body = f;
            loop {
                match body {
                    Formula::ForAll(v, b) if universal => {
                        vars.push(v.as_str());
                        body = b;
                    }
                    Formula::Exists(v, b) if !universal => {
                        vars.push(v.as_str());
                        body = b;
                    }
                    _ => break,
                }
            }
            if o.unicode {
                out.push_str(if universal { "∀" } else { "∃" });
            } else {
                out.push_str(if universal { "forall " } else { "exists " });
            }
            out.push_str(&vars.join(", "));
            out.push_str(". ");
            write_formula(body, 0, o, out);
            if paren {
                out.push(')');
            }
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationFile {
    arity: usize,
    tuples: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureFile {
    domain_size: usize,
    relations: BTreeMap<String, RelationFile>,
}

/// Parses a structure file. The resulting signature has equality enabled.
pub fn parse_structure(text: &str) -> Result<FiniteStructure, crate::Error> {
    let file: StructureFile = serde_json::from_str(text).map_err(|e| {
        let (line, column) = (e.line().max(1), e.column().max(1));
        let start = line_offset(text, line) + column - 1;
        syntax(
            SourceSpan {
                start: start.min(text.len()),
                end: start.min(text.len()),
                line,
                column,
            },
            e.to_string(),
        )
    })?;
    if file.domain_size == 0 {
        return Err(syntax(SourceSpan::default(), "domain_size must be a positive integer").into());
    }
    let mut sig = Signature::new();
    for (name, rel) in &file.relations {
        if !is_relation_name(name) {
            return Err(syntax(SourceSpan::default(), format!("`{name}` is not a relation name")).into());
        }
        sig.add_symbol(name, rel.arity)?;
    }
    let mut s = FiniteStructure::new(sig, file.domain_size)?;
    for (name, rel) in &file.relations {
        for t in &rel.tuples {
            if t.len() != rel.arity {
                return Err(ParseError::ArityMismatch {
                    relation: name.clone(),
                    expected: rel.arity,
                    found: t.len(),
                }
                .into());
            }
            if t.iter().any(|&e| e >= file.domain_size) {
                return Err(ParseError::TupleOutOfRange {
                    relation: name.clone(),
                    tuple: t.clone(),
                    domain_size: file.domain_size,
                }
                .into());
            }
            s.insert(name, t)?;
        }
    }
    Ok(s)
}

fn line_offset(text: &str, line: usize) -> usize {
    text.split_inclusive('\n').take(line - 1).map(str::len).sum()
}

fn is_relation_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn structure_file(s: &FiniteStructure) -> StructureFile {
    StructureFile {
        domain_size: s.size(),
        relations: s
            .signature()
            .symbols()
            .map(|(name, arity)| {
                (
                    name.to_string(),
                    RelationFile {
                        arity,
                        tuples: s.tuples(name).collect(),
                    },
                )
            })
            .collect(),
    }
}

/// Canonical compact JSON: keys sorted, tuples sorted.
pub fn structure_to_json(s: &FiniteStructure) -> String {
    serde_json::to_string(&structure_file(s)).expect("structure serializes")
}

/// The canonical layout as a JSON value, for embedding in reports.
pub fn structure_to_value(s: &FiniteStructure) -> serde_json::Value {
    serde_json::to_value(structure_file(s)).expect("structure serializes")
}
