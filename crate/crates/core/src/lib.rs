//! Finite covers of one-sided subshifts, interval maps and substitutions.

pub mod error;
pub mod fischer;
pub mod graph;
pub mod input;
pub mod interval;
pub mod krieger;
pub mod relation;
pub mod shift;
pub mod substitution;
pub mod transfer;
pub mod word;

pub use relation::{TransitionRelation, VertexSet};
pub use shift::{
    LabeledEdge, LabeledGraph, OracleSpec, PastProfile, RightContext, ShiftError, ShiftOptions,
    Subshift, SubshiftSpec,
};
pub use word::{Alphabet, Symbol, Word};

pub use error::{Error, ErrorKind};
