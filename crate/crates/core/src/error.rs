use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty solution")]
    EmptySolution,

    #[error("empty point set")]
    EmptySet,

    #[error("point {0} is not in the space")]
    UnknownPoint(usize),

    #[error("instance too large for oracle: {subsets} subsets exceed budget {budget}")]
    OracleBudget { subsets: u128, budget: u128 },

    #[error("degenerate space: all distances are zero")]
    DegenerateSpace,

    #[error("cannot empty solution")]
    CannotEmpty,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("missing reference value: {0}")]
    MissingReference(&'static str),

    #[error("not a metric: {0}")]
    NotAMetric(String),

    #[error("query budget exceeded ({0} queries)")]
    QueryBudgetExceeded(u64),

    #[error("adversary not finalized")]
    NotFinalized,

    #[error("malformed input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
