use thiserror::Error;

use crate::axioms::AxiomError;
use crate::bisim::BisimError;
use crate::parser::ParseError;
use crate::simulate::SimError;
use crate::terms::TermError;

/// Any failure of the library, for callers that drive several analyses.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Bisim(#[from] BisimError),
    #[error(transparent)]
    Axiom(#[from] AxiomError),
}

impl Error {
    /// Whether the failure is a resource limit rather than bad input.
    pub fn is_limit(&self) -> bool {
        matches!(
            self,
            Error::Bisim(BisimError::StateCapExceeded(_))
                | Error::Sim(SimError::DepthExceeded(_))
                | Error::Bisim(BisimError::Sim(SimError::DepthExceeded(_)))
                | Error::Axiom(AxiomError::BudgetExceeded(_))
        )
    }
}
