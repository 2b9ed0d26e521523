use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("duplicate element `{0}`")]
    DuplicateElement(String),

    #[error("order relation is not antisymmetric: `{0}` and `{1}` lie on a cycle")]
    Cycle(String, String),

    #[error("subset is not downward closed: `{missing}` lies below `{member}` but is missing")]
    NotReysha { member: String, missing: String },

    #[error("invalid element id `{0}`: expected an atom without `(`, `)` or `,`, or a tuple of ids")]
    ReservedId(String),

    #[error("morphism mismatch: {0}")]
    Mismatch(String),

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("invalid category: {0}")]
    InvalidCategory(String),

    #[error("diagram is not functorial: {0}")]
    NotFunctorial(String),

    #[error("transformation is not natural: {0}")]
    NotNatural(String),

    #[error("square does not commute: {0}")]
    NonCommuting(String),

    #[error("class violation: {0}")]
    ClassViolation(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid pre-morphism: {0}")]
    InvalidPreMorphism(String),

    #[error("truncation exhausted: {0}")]
    TruncationExhausted(String),

    #[error("not colim-equal at index `{0}`")]
    NotColimEqual(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Errors that mean "the finite model ran out of room", as opposed to a
    /// malformed input or a failed verification.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::TruncationExhausted(_) | Error::BudgetExceeded(_) | Error::SearchExhausted(_)
        )
    }
}
