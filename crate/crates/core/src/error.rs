use thiserror::Error;

use crate::model::JobId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed instance: {0}")]
    Syntax(#[from] serde_json::Error),

    #[error("machine count must be at least 1, got {0}")]
    MachineCount(usize),

    #[error("source and sink must differ (both are {0:?})")]
    SameEndpoints(String),

    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),

    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),

    #[error("duplicate arc id {0}")]
    DuplicateArc(JobId),

    #[error("arc {id} has a negative processing time {value} on machine {machine}")]
    NegativeTime { id: JobId, machine: usize, value: i64 },

    #[error("arc {id} has {got} processing times, expected {expected}")]
    Arity { id: JobId, got: usize, expected: usize },

    #[error("job set is empty")]
    EmptyJobs,

    #[error("not a permutation of the job set: {0}")]
    NotAPermutation(String),

    #[error("inconsistent machine orders: {0}")]
    InconsistentOrders(String),

    #[error("sink is unreachable from source")]
    Unreachable,

    #[error("more than {cap} s-t paths; instance too large for the oracle")]
    PathCapExceeded { cap: usize },

    #[error("{jobs} jobs exceed the brute-force cap of {cap}")]
    JobCapExceeded { jobs: usize, cap: usize },

    #[error("eps must be a positive rational, got {0:?}")]
    InvalidEps(String),

    #[error("invalid generator parameters: {0}")]
    InvalidParameter(String),

    #[error("tight-instance search failed: {0}")]
    SearchFailed(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Unreachable => 2,
            Error::PathCapExceeded { .. } | Error::JobCapExceeded { .. } => 3,
            _ => 1,
        }
    }
}
