use thiserror::Error;

use crate::relations::RelationVerdict;
use crate::system::{Input, State};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown state `{0}`")]
    UnknownState(State),

    #[error("unknown input `{0}`")]
    UnknownInput(Input),

    #[error("invalid identifier `{0}`: identifiers must be non-empty and may not contain `|`")]
    InvalidIdentifier(String),

    #[error("controller at `{state}` selects `{input}`, which is not available there")]
    UnavailableInput { state: State, input: Input },

    #[error("controller has an empty choice set at `{0}`")]
    EmptyChoice(State),

    #[error("controller is undefined at reached state `{0}`")]
    ControllerUndefined(State),

    #[error("horizon must be at least 1")]
    ZeroHorizon,

    #[error("relation domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("relation is not strict: `{0}` has no related abstract state")]
    NonStrictRelation(State),

    #[error("{kind} relation refuted")]
    RelationRefuted {
        kind: crate::relations::RelationKind,
        verdict: Box<RelationVerdict>,
    },

    #[error("interface has no entry for ({x1}, {x2}, {u2})")]
    InterfaceIncomplete { x1: State, x2: State, u2: Input },

    #[error("interface is invalid at ({x1}, {x2}, {u2}): {reason}")]
    InvalidInterface {
        x1: State,
        x2: State,
        u2: Input,
        reason: String,
    },

    #[error("concretized controller has an empty input set at `{0}`")]
    EmptyConcretization(State),

    #[error("dynamic concretizer cannot start at `{0}`: abstract controller undefined on every related abstract state")]
    InitializationFailed(State),

    #[error("broken alternating simulation certificate: F2({x2}, {u2}) does not meet R({x1_next})")]
    BrokenCertificate { x2: State, u2: Input, x1_next: State },

    #[error("scripted choice `{0}` is not among the available candidates")]
    ScriptMismatch(String),

    #[error("target and obstacle sets overlap at `{0}`")]
    TargetObstacleOverlap(State),

    #[error("enumeration needs {needed} controllers, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("postcondition violated: {0}")]
    Postcondition(String),

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("set escapes the cover domain: {0}")]
    OutOfDomain(String),

    #[error("image of cell `{cell}` under `{input}` escapes the domain")]
    ImageEscapes { cell: State, input: Input },

    #[error("bundle has no {kind} named `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code, used by the CLI on stderr.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownState(_) => "unknown_state",
            Error::UnknownInput(_) => "unknown_input",
            Error::InvalidIdentifier(_) => "invalid_identifier",
            Error::UnavailableInput { .. } => "unavailable_input",
            Error::EmptyChoice(_) => "empty_choice",
            Error::ControllerUndefined(_) => "controller_undefined",
            Error::ZeroHorizon => "zero_horizon",
            Error::DomainMismatch(_) => "domain_mismatch",
            Error::NonStrictRelation(_) => "non_strict_relation",
            Error::RelationRefuted { .. } => "relation_refuted",
            Error::InterfaceIncomplete { .. } => "interface_incomplete",
            Error::InvalidInterface { .. } => "invalid_interface",
            Error::EmptyConcretization(_) => "empty_concretization",
            Error::InitializationFailed(_) => "initialization_failed",
            Error::BrokenCertificate { .. } => "broken_certificate",
            Error::ScriptMismatch(_) => "script_mismatch",
            Error::TargetObstacleOverlap(_) => "target_obstacle_overlap",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::Postcondition(_) => "postcondition",
            Error::InvalidInterval(_) => "invalid_interval",
            Error::OutOfDomain(_) => "out_of_domain",
            Error::ImageEscapes { .. } => "image_escapes",
            Error::UnknownName { .. } => "unknown_name",
            Error::Format(_) => "format",
            Error::Json(_) => "json",
        }
    }
}
