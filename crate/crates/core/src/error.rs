use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("arithmetic overflow computing {0}")]
    Overflow(&'static str),

    #[error("index {index} out of range (limit {limit})")]
    OutOfBounds { index: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("size budget exceeded: {what} = {actual} exceeds the limit of {limit}")]
    SizeBudget {
        what: &'static str,
        actual: u128,
        limit: u128,
    },

    #[error("decode failure: {0}")]
    DecodeFailure(String),

    #[error("unknown fixture `{name}` (valid names: {})", valid.join(", "))]
    UnknownFixture {
        name: String,
        valid: &'static [&'static str],
    },

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("code is not N-partite: {0}")]
    NotPartite(String),

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("no qualifying decoding set of W_{message} contains X_{symbol} (depth {depth})")]
    TreeStuck {
        depth: usize,
        message: usize,
        symbol: usize,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("content hash mismatch: document says {stated}, computed {computed}")]
    HashMismatch { stated: String, computed: String },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("retrieval from database {database} failed: {reason}")]
    Retrieval { database: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
