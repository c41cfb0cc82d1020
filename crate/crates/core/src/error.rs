use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular matrix")]
    Singular,

    #[error("rank-deficient basis: rank {rank} < dimension {dim}")]
    RankDeficient { rank: usize, dim: usize },

    #[error("malformed problem: {0}")]
    Malformed(String),

    #[error("equality constraints are inconsistent")]
    InconsistentEqualities,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("schema error at {context}: {message}")]
    Schema { context: String, message: String },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Schema { .. } | Error::RankDeficient { .. } => 2,
            Error::Infeasible
            | Error::Unbounded
            | Error::Domain(_)
            | Error::InconsistentEqualities
            | Error::Dimension(_)
            | Error::Malformed(_)
            | Error::Singular => 3,
            Error::Solver(_) | Error::Io(_) => 4,
        }
    }
}
