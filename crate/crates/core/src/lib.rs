//! Finite-model workbench for friendliness, a weakening of first-order
//! consequence: Γ is friendly to φ when every model of Γ is related to a
//! model that can be expanded to satisfy Γ ∪ {φ}.
//!
//! The propositional fragment is decided exactly. First-order variants are
//! checked over finite structures up to explicit size bounds, and every
//! verdict carries a flag saying whether it settles the unbounded question.

pub mod beth;
pub mod corpus;
pub mod error;
pub mod formula_enum;
pub mod friendliness;
pub mod games;
pub mod par;
pub mod parser;
pub mod propositional;
pub mod semantics;
pub mod structure;
pub mod suites;
pub mod syntax;

pub use beth::{find_explicit_definition, implicitly_defines, Definability};
pub use error::{Error, Result};
pub use friendliness::{
    bounded_friendly, bounded_friendly_with, find_witness, validate_witness, BoundedVerdict, FriendlinessConfig,
    Witness,
};
pub use games::{distinguishing_sentence, ef_equivalent};
pub use parser::{
    parse_formula, parse_sentence, parse_structure, parse_theory, pretty_print, pretty_print_with, structure_to_json,
    ParseError, PrettyOptions, SourceSpan,
};
pub use propositional::{
    prop_consistency_characterization, prop_counter_valuation, prop_entails, prop_friendly,
    prop_friendly_via_refinement,
};
pub use semantics::{
    entails_bounded, enumerate_models, eval, eval_sentence, find_model, find_model_with, pure_equality_finite_model,
    spectrum, Assignment, BoundedEntailmentVerdict, SearchOptions,
};
pub use structure::{BaseRelation, ExpansionRelation, FiniteStructure};
pub use syntax::{Formula, Signature, Theory};
