use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid group factor {family}({n}): {reason}")]
    InvalidFactor { family: String, n: u32, reason: String },

    #[error("index {index} outside 1..={max}")]
    IndexOutOfRange { index: u32, max: u32 },

    #[error("polynomial is not homogeneous of degree {0}")]
    NotHomogeneous(u32),

    /// A pair description violates one of its invariants; `field` names the
    /// offending entry (e.g. `ranks.kh`, `map_kh_in_h`).
    #[error("{field}: {message}")]
    InvalidPair { field: String, message: String },

    #[error("pair file does not match schema: {0}")]
    Schema(String),

    #[error("restriction of {generator} to the H_U torus is not Weyl-invariant; check map_h_in_g")]
    NotInvariant { generator: String },

    #[error("cannot parse witness expression {expr:?}: {reason}")]
    WitnessParse { expr: String, reason: String },

    #[error("unknown pair {0:?}")]
    UnknownPair(String),

    #[error("unknown family {0:?}")]
    UnknownFamily(String),

    #[error("parameters out of bounds for {family}: {reason}")]
    OutOfBounds { family: String, reason: String },

    #[error("certificate re-check failed for {0}")]
    Certificate(String),
}

impl Error {
    pub(crate) fn pair(field: &str, message: impl Into<String>) -> Self {
        Error::InvalidPair {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// True for errors caused by user input (bad files, selectors, ranges).
    pub fn is_user_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidPair { .. }
                | Error::Schema(_)
                | Error::UnknownPair(_)
                | Error::UnknownFamily(_)
                | Error::OutOfBounds { .. }
                | Error::InvalidFactor { .. }
                | Error::NotInvariant { .. }
                | Error::WitnessParse { .. }
        )
    }
}
