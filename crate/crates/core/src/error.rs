//! Crate-wide error type and its coarse classification.

use crate::fischer::FischerError;
use crate::graph::GraphError;
use crate::input::InputError;
use crate::interval::partition::PartitionError;
use crate::interval::MapError;
use crate::krieger::KriegerError;
use crate::shift::ShiftError;
use crate::substitution::SubstitutionError;
use crate::transfer::TransferError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Krieger(#[from] KriegerError),
    #[error(transparent)]
    Fischer(#[from] FischerError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The input was malformed or does not satisfy an operation's precondition.
    Input,
    /// A budget, horizon or iteration limit was hit.
    Budget,
    /// An internal consistency check failed.
    Internal,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use ErrorKind::*;
        match self {
            Error::Input(_) | Error::Graph(_) | Error::Partition(_) | Error::Substitution(_) => Input,
            Error::Shift(e) | Error::Krieger(KriegerError::Shift(e)) | Error::Fischer(FischerError::Shift(e)) => {
                shift_kind(e)
            }
            Error::Krieger(KriegerError::SourceClassMissing { .. }) => Budget,
            Error::Krieger(_) => Input,
            Error::Fischer(FischerError::Krieger(KriegerError::Shift(e))) => shift_kind(e),
            Error::Fischer(FischerError::Krieger(_)) => Budget,
            Error::Fischer(FischerError::NoSynchronizingWord { .. } | FischerError::NotTerminated) => Budget,
            Error::Fischer(FischerError::NotStronglyConnected) => Internal,
            Error::Fischer(_) => Input,
            Error::Transfer(TransferError::NoConvergence { .. }) => Budget,
            Error::Transfer(_) => Input,
            Error::Map(MapError::BudgetExceeded { .. }) => Budget,
            Error::Map(_) => Input,
        }
    }

    fn shift_source(&self) -> Option<&ShiftError> {
        match self {
            Error::Shift(e)
            | Error::Krieger(KriegerError::Shift(e))
            | Error::Fischer(FischerError::Shift(e))
            | Error::Fischer(FischerError::Krieger(KriegerError::Shift(e))) => Some(e),
            _ => None,
        }
    }

    /// Short machine-readable code.
    pub fn code(&self) -> &'static str {
        if let Some(e) = self.shift_source() {
            return match e {
                ShiftError::HorizonExceeded { .. } => "horizon-exceeded",
                _ if shift_kind(e) == ErrorKind::Budget => "budget-exceeded",
                _ => "shift",
            };
        }
        match self {
            Error::Input(_) => "input",
            Error::Graph(_) => "graph",
            Error::Krieger(_) => "krieger",
            Error::Fischer(FischerError::NotIrreducible) => "not-irreducible",
            Error::Fischer(_) => "fischer",
            Error::Transfer(TransferError::NoConvergence { .. }) => "no-convergence",
            Error::Transfer(_) => "transfer",
            Error::Partition(_) => "partition",
            Error::Map(MapError::BudgetExceeded { .. }) => "budget-exceeded",
            Error::Map(_) => "map",
            Error::Substitution(_) => "substitution",
            Error::Shift(_) => "shift",
        }
    }
}

fn shift_kind(e: &ShiftError) -> ErrorKind {
    match e {
        ShiftError::HorizonExceeded { .. }
        | ShiftError::MonoidBudgetExceeded { .. }
        | ShiftError::BudgetExceeded { .. } => ErrorKind::Budget,
        _ => ErrorKind::Input,
    }
}
