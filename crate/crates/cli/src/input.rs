use std::fs;
use std::path::Path;

use folfriend::corpus::at_least_schema;
use folfriend::parser::{parse_inline_theory, parse_theory_with};
use folfriend::{parse_structure, FiniteStructure, Formula, Theory};

use crate::{Failure, Global};

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))
}

fn located(source: &str, e: folfriend::Error) -> Failure {
    match e {
        folfriend::Error::ResourceBudgetExceeded { .. } => e.into(),
        other => Failure::Usage(format!("{source}: {other}")),
    }
}

/// A theory from a file, if `arg` names one, or from `;`-separated
/// inline sentences.
pub fn theory(g: &Global, arg: &str) -> Result<Theory, Failure> {
    if Path::new(arg).is_file() {
        parse_theory_with(&read(arg)?, g.equality()).map_err(|e| located(arg, e))
    } else {
        parse_inline_theory(arg, g.equality()).map_err(|e| located("inline", e))
    }
}

/// Premises with the `--schema` fragment added.
pub fn premises(g: &Global, arg: Option<&str>) -> Result<Theory, Failure> {
    let mut t = match arg {
        Some(a) => theory(g, a)?,
        None => {
            let mut t = Theory::new();
            t.set_equality(g.equality())?;
            t
        }
    };
    if let Some(spec) = &g.schema {
        let k = spec
            .strip_prefix("at-least:")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k > 0)
            .ok_or_else(|| Failure::Usage(format!("unknown schema {spec:?}; expected at-least:<k>")))?;
        for s in at_least_schema(k).sentences() {
            t.push(s.clone())?;
        }
    }
    Ok(t)
}

/// A single sentence: the conjunction of a theory's sentences.
pub fn sentence(g: &Global, arg: &str) -> Result<Formula, Failure> {
    let t = theory(g, arg)?;
    if t.sentences().is_empty() {
        return Err(Failure::Usage(format!("{arg}: no sentence given")));
    }
    Ok(Formula::conjunction(t.sentences().iter().cloned()))
}

/// A formula that may have free variables.
pub fn formula(g: &Global, arg: &str) -> Result<Formula, Failure> {
    let text = if Path::new(arg).is_file() {
        read(arg)?
    } else {
        arg.to_string()
    };
    folfriend::parse_formula(text.trim(), g.equality()).map_err(|e| located(arg, e.into()))
}

pub fn structure(path: &str) -> Result<FiniteStructure, Failure> {
    parse_structure(&read(path)?).map_err(|e| located(path, e))
}
