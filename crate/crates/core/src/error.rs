use thiserror::Error;

/// Errors produced by the analysis operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A packet ID at `position` (1-based) is zero or negative.
    #[error("packet ID {id} at position {position} is not positive")]
    NonPositiveId { position: usize, id: i64 },

    /// A packet ID at `position` (1-based) already appeared at `first`.
    #[error("packet ID {id} at position {position} repeats position {first}")]
    DuplicateId {
        position: usize,
        first: usize,
        id: u64,
    },

    /// A receiver was handed an ID it had already received.
    #[error("packet ID {id} at arrival {position} was already received")]
    RepeatedArrival { position: usize, id: u64 },

    /// The sequence is not a permutation of 1..n.
    #[error("sequence of length {len} is not a permutation of 1..{len}")]
    NotPermutation { len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The receiver buffer needs more room than the configured capacity.
    #[error("buffer of {required} packets at position {position} exceeds capacity {capacity}")]
    CapacityExceeded {
        position: usize,
        required: u64,
        capacity: u64,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
