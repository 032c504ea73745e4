use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("infeasible policy: {0}")]
    Infeasible(String),

    #[error("malformed policy: {0}")]
    MalformedPolicy(String),

    #[error("instance too large for exact search: {what} = {got} exceeds cap {cap}")]
    CapExceeded { what: &'static str, got: usize, cap: usize },

    #[error("state budget of {0} exhausted")]
    StateBudget(usize),

    #[error("separability violated at box {box_id} for components ({a}, {b}): TV = {tv}")]
    Separability { box_id: usize, a: usize, b: usize, tv: String },

    #[error("phase {phase} removed no scenario")]
    Stalled { phase: usize },

    #[error("{0}")]
    Unsupported(String),

    #[error("no trials")]
    NoTrials,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
