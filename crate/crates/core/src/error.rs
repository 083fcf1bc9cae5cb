use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("matrix has a negative eigenvalue {eigenvalue:.3e}")]
    NegativeSpectrum { eigenvalue: f64 },
    #[error("matrix is not an orthogonal projection (defect {defect:.3e})")]
    NotAProjection { defect: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid group action: {0}")]
    InvalidAction(String),
    #[error("group action does not fit the factor shape: {0}")]
    ActionShapeMismatch(String),
    #[error("objects carry different groups")]
    GroupMismatch,
    #[error("system mismatch: {0}")]
    SystemMismatch(String),
    #[error("characterizations disagree: {0}")]
    CharacterizationMismatch(String),
    #[error("no channel has this relation as support: marginal of source factor {factor} is singular")]
    NoChannel { factor: usize },
    #[error("graph is not a confusability graph")]
    NotConfusability,
    #[error("graph is not a simple graph")]
    NotSimple,
    #[error("relation is not symmetric (defect {defect:.3e})")]
    NotSymmetric { defect: f64 },
    #[error("blend parameter gives a non-positive element (min eigenvalue {min_eigenvalue:.3e})")]
    PsdViolation { min_eigenvalue: f64 },
    #[error("CP morphism is not a channel: {0}")]
    NotAChannel(String),
    #[error("channel is not reversible")]
    NotReversible,
    #[error("object is not covariant: {0}")]
    NotCovariant(String),
    #[error("invalid source: {0}")]
    SourceInvalid(String),
    #[error("encoding is not valid for this source and channel")]
    NotValid,
    #[error("internal theorem check failed: {0}")]
    TheoremViolation(String),
    #[error("round trip failed (defect {defect:.3e})")]
    RoundTripFailure { defect: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
