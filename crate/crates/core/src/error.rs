use thiserror::Error;

/// Every failure the library can report. `name()` gives the stable
/// machine-readable identifier printed by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("inadmissible index: {0}")]
    InadmissibleIndex(String),
    #[error("sublattice is not similar: {0}")]
    NotSimilar(String),
    #[error("no representation of index {index} for {lattice}")]
    NoRepresentation { lattice: String, index: i64 },
    #[error("group property violated: {0}")]
    GroupPropertyViolation(String),
    #[error("orbit counts differ: {0}")]
    SizeMismatch(String),
    #[error("edge set cannot be filled by whole orbits: {0}")]
    AsymmetricEdgeSet(String),
    #[error("zero-length edge has no color")]
    ZeroEdge,
    #[error("not a label of this design: {0}")]
    NotALabel(String),
    #[error("property check failed: {0}")]
    PropertyCheckFailed(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::InadmissibleIndex(_) => "InadmissibleIndex",
            Error::NotSimilar(_) => "NotSimilar",
            Error::NoRepresentation { .. } => "NoRepresentation",
            Error::GroupPropertyViolation(_) => "GroupPropertyViolation",
            Error::SizeMismatch(_) => "SizeMismatch",
            Error::AsymmetricEdgeSet(_) => "AsymmetricEdgeSet",
            Error::ZeroEdge => "ZeroEdge",
            Error::NotALabel(_) => "NotALabel",
            Error::PropertyCheckFailed(_) => "PropertyCheckFailed",
            Error::ResourceLimit(_) => "ResourceLimit",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
