use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input contains no rows")]
    EmptyInput,

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: input is not valid UTF-8")]
    InvalidUtf8 { line: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("column {column}: value {value:?} is missing from the explicit value order")]
    MissingValue { column: usize, value: String },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("{0:?} is not a permutation")]
    InvalidPermutation(Vec<usize>),

    #[error("column {column}: code {code} is out of range for cardinality {cardinality}")]
    CodeOutOfRange {
        column: usize,
        code: u32,
        cardinality: u32,
    },

    #[error("{what}: {needed} exceeds the budget of {limit}{hint}")]
    BudgetExceeded {
        what: &'static str,
        needed: String,
        limit: String,
        hint: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn budget(
        what: &'static str,
        needed: impl ToString,
        limit: impl ToString,
    ) -> Self {
        Error::BudgetExceeded {
            what,
            needed: needed.to_string(),
            limit: limit.to_string(),
            hint: "",
        }
    }

    /// True for refusals caused by a configured size limit rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
