use thiserror::Error;

use crate::parser::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("relation {name} used with arity {left} and {right}")]
    ArityClash { name: String, left: usize, right: usize },
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("invalid functional hint: {name} has arity {arity}, output index {output}")]
    InvalidFunctionalHint { name: String, output: usize, arity: usize },
    #[error("free variable {0} in a sentence")]
    FreeVariable(String),
    #[error("equality used but the signature is equality-free")]
    EqualityNotEnabled,
    #[error("signature is not contained in the target signature")]
    SignatureNotContained,
    #[error("structures have different signatures")]
    SignatureMismatch,
    #[error("exact elementary checks need equality; only rank-bounded EF comparison is available without it")]
    EqualityFreeUnsupported,
    #[error("operation requires an equality-free signature")]
    EqualityPresent,
    #[error("target size {target} is smaller than current size {current}")]
    TargetTooSmall { current: usize, target: usize },
    #[error("element {element} is outside a domain of size {size}")]
    ElementOutOfRange { element: usize, size: usize },
    #[error("domain size must be positive")]
    EmptyDomain,
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("relation {0} is not in the structure's signature")]
    VocabularyNotContained(String),
    #[error("search node budget of {limit} exceeded")]
    ResourceBudgetExceeded { limit: u64 },
    #[error("sentence is not a pure equality sentence")]
    NotPureEquality,
    #[error("not propositional: {0}")]
    NotPropositional(String),
    #[error("{count} shared variables exceeds the cap of {cap}")]
    TooManySharedVariables { count: usize, cap: usize },
    #[error("{count} propositional variables exceeds the cap of {cap}")]
    TooManyVariables { count: usize, cap: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::ResourceBudgetExceeded { .. })
    }
}
