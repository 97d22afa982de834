//! Executable embedding steps: free products, amalgams over centralizers and
//! centralizer extensions, realized inside `G[[r]]_N` with fresh symbols.

mod certificate;
mod chain;
mod surface;
mod word;

pub use certificate::{
    certify_all, nontrivial_certificate, Certificate, Mode, Verdict, SAMPLE_BOUND, SAMPLE_DRAWS,
};
pub use chain::{Chain, Partner, StepRecord};
pub use surface::{surface_group, surface_group_of_genus, surface_names, surface_relator};
pub use word::{reduced_words, Letter, Word};

use thiserror::Error;

use crate::field::FieldError;
use crate::liealg::LieError;
use crate::series::SeriesError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("generator name collision: {0}")]
    NameCollision(String),
    #[error("partner generator {0} is the identity")]
    TrivialPartner(String),
    #[error("trivial amalgam element: {0} evaluates to the identity")]
    TrivialAmalgamElement(String),
    #[error("trivial base")]
    TrivialBase,
    #[error("base vector field must have rational coefficients")]
    BaseNotRational,
    #[error("chain has no generators")]
    EmptyChain,
    #[error("step needs at least one partner generator")]
    NoPartners,
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("odd genus {0}: only even genus 2k is constructible by a single amalgam doubling")]
    OddGenus(usize),
    #[error("replay mismatch: {0}")]
    ReplayMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("blowup while {context}: {terms} terms exceed the limit {limit}")]
    Blowup {
        context: String,
        terms: usize,
        limit: usize,
    },
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn field_blowup(e: &FieldError) -> Option<(usize, usize)> {
    match e {
        FieldError::Blowup { terms, limit } => Some((*terms, *limit)),
        _ => None,
    }
}

fn series_blowup(e: &SeriesError) -> Option<(usize, usize)> {
    match e {
        SeriesError::Field(f) => field_blowup(f),
        _ => None,
    }
}

impl EmbedError {
    /// `(terms, limit)` when the error is the term-count guard firing.
    pub fn blowup(&self) -> Option<(usize, usize)> {
        match self {
            EmbedError::Blowup { terms, limit, .. } => Some((*terms, *limit)),
            EmbedError::Field(f) => field_blowup(f),
            EmbedError::Series(s) => series_blowup(s),
            EmbedError::Lie(LieError::Field(f)) => field_blowup(f),
            EmbedError::Lie(LieError::Series(s)) => series_blowup(s),
            _ => None,
        }
    }
}
