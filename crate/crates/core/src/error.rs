use thiserror::Error;

use crate::groupoid::ValidationReport;
use crate::decoherence::PhaseReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a groupoid needs at least one object")]
    EmptyGroupoid,

    /// Input that cannot even be represented as a groupoid table.
    #[error("malformed groupoid data: {0}")]
    Structure(String),

    #[error("not a group: {0}")]
    Group(String),

    #[error("unknown object `{0}`")]
    UnknownObject(String),

    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),

    #[error("operands belong to different groupoids")]
    GroupoidMismatch,

    #[error("{what}: size {actual} exceeds the limit of {limit}")]
    Resource {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("left Haar invariance fails: weight({composite}) != weight({gamma}) for {alpha} ∘ {gamma}")]
    HaarInvariance {
        alpha: String,
        gamma: String,
        composite: String,
    },

    #[error("phase action is not logarithmic ({} violations)", .0.violations.len())]
    Phase(PhaseReport),

    #[error("groupoid axioms violated ({} violations)", .0.violations.len())]
    Axioms(ValidationReport),

    #[error("modular function undefined at `{0}` (zero measure)")]
    ModularDomain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}
