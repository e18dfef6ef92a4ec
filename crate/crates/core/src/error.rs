use thiserror::Error;

/// Errors raised across the library.
///
/// Budget exhaustion and undecided equalities are usually *values*
/// (see [`crate::rewriting::Verdict`]); only operations that cannot
/// produce a meaningful partial result report them here.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("duplicate letter `{0}`")]
    DuplicateLetter(String),
    #[error("alphabet order is not a permutation of the letters")]
    BadOrder,
    #[error("relation {0} is not of the form w = 1")]
    NotSpecial(usize),
    #[error("relation {0} has an empty relator")]
    EmptyRelator(usize),
    #[error("operation requires a non-empty word")]
    EmptyWord,
    #[error("rewrite system is not oriented")]
    UnorientedSystem,
    #[error("cannot orient `{0}` = `{1}`")]
    Unorientable(String, String),
    #[error("budget exhausted after {spent} steps")]
    BudgetExhausted { spent: u64 },
    #[error("presentation has {0} relators, expected exactly one")]
    NotOneRelator(usize),
    #[error("units system is not complete")]
    UnitsNotCompleted,
    #[error("delta is not certified: unresolved candidates {0:?}")]
    NonCertifiedDelta(Vec<String>),
    #[error("word `{0}` is not irreducible")]
    NotIrreducible(String),
    #[error("composite of consecutive maps at slot {slot} is not zero")]
    CompositeNotZero { slot: usize },
    #[error("matrix dimension mismatch: {0}")]
    Dimension(String),
    #[error("no basis factorization for `{0}`")]
    FactorizationFailure(String),
    #[error("normal form unavailable for `{0}`")]
    NoNormalForm(String),
    #[error("invalid construction: {0}")]
    Construction(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
