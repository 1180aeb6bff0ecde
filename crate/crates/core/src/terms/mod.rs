//! Process terms, labels, substitutions and canonical forms.

mod matching;
mod subst;
mod syntax;
mod theory;

pub use matching::{extend_label_match, extend_term_match, match_label, match_term};
pub use subst::{substitute, substitute_label, Substitution};
pub use syntax::{is_infix_name, op_display_name, Label, Sort, Term};
pub use theory::{canon_data, canon_label, canon_process, canon_term, summands, EquationalTheory, OpAttrs};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("sort error: variable {var} of sort {expected} cannot take {found}")]
    SortError { var: String, expected: Sort, found: String },
    #[error("term uses operators outside BCCSP: {0}")]
    NonBccspTerm(String),
    #[error("summand is not action prefixed: {0}")]
    NotHeadNormal(String),
}
