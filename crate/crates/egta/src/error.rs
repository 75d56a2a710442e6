use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("infeasible floor: floor {floor} * dimension {dim} exceeds 1")]
    InfeasibleFloor { floor: f64, dim: usize },

    #[error("strategy index {index} out of range for player {player} (limit {limit})")]
    IndexOutOfRange {
        player: usize,
        index: usize,
        limit: usize,
    },

    #[error("duplicate strategy index {index} for player {player}")]
    DuplicateIndex { player: usize, index: usize },

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("unsupported game: {0}")]
    Unsupported(String),

    #[error("linear program failed: {0}")]
    LpFailure(String),

    #[error("empty trace")]
    EmptyTrace,

    #[error("PSRO iteration {iteration} failed: {source}")]
    PsroIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("grid too large: {points} points exceed the {limit} cap; use the amoeba search instead")]
    GridTooLarge { points: u128, limit: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
