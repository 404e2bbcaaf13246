use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Typed failures of the adaptation engine.
///
/// Load errors carry enough context (offending ids, cycle path) to point an
/// author at the broken line of a document.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    MalformedDocument(String),

    #[error("duplicate feature id `{0}`")]
    DuplicateFeatureId(String),

    #[error("edge ({prerequisite}, {dependent}) names undeclared feature `{missing}`")]
    UnknownFeatureInEdge {
        prerequisite: String,
        dependent: String,
        missing: String,
    },

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(String, String),

    #[error("prerequisite cycle: {}", .0.join(" -> "))]
    CycleDetected(Vec<String>),

    #[error("unknown feature `{0}`")]
    UnknownFeature(String),

    #[error("unknown graph `{0}`")]
    UnknownGraph(String),

    #[error("invalid age level {0}")]
    InvalidAgeLevel(i64),

    #[error("lexicon entry `{entry_id}` references undeclared feature `{feature_id}`")]
    UnknownFeatureReference { entry_id: String, feature_id: String },

    #[error("duplicate lexicon entry id `{0}`")]
    DuplicateEntryId(String),

    #[error("session has no items")]
    EmptySession,

    #[error("feature `{0}` is not open for play")]
    FeatureNotOpen(String),

    #[error("no playable feature")]
    NoPlayableFeature,

    #[error("no content for feature `{0}`")]
    NoContentForFeature(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("event log replay failed: {0}")]
    Replay(String),
}

impl Error {
    /// Stable machine-readable name, used in service error bodies.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MalformedDocument(_) => "MalformedDocument",
            Error::DuplicateFeatureId(_) => "DuplicateFeatureId",
            Error::UnknownFeatureInEdge { .. } => "UnknownFeatureInEdge",
            Error::DuplicateEdge(..) => "DuplicateEdge",
            Error::CycleDetected(_) => "CycleDetected",
            Error::UnknownFeature(_) => "UnknownFeature",
            Error::UnknownGraph(_) => "UnknownGraph",
            Error::InvalidAgeLevel(_) => "InvalidAgeLevel",
            Error::UnknownFeatureReference { .. } => "UnknownFeatureReference",
            Error::DuplicateEntryId(_) => "DuplicateEntryId",
            Error::EmptySession => "EmptySession",
            Error::FeatureNotOpen(_) => "FeatureNotOpen",
            Error::NoPlayableFeature => "NoPlayableFeature",
            Error::NoContentForFeature(_) => "NoContentForFeature",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Replay(_) => "Replay",
        }
    }
}
