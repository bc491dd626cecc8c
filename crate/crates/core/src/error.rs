use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QssError {
    #[error("capacity exceeded: {requested} qubits requested, cap is {cap}")]
    Capacity { requested: usize, cap: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("states are not pairwise orthogonal (|<{i}|{j}>| = {overlap:.3e}); perfect discrimination impossible")]
    DiscriminationImpossible { i: usize, j: usize, overlap: f64 },

    #[error("insufficient data: no matching rounds for term {term}")]
    InsufficientData { term: String },

    #[error("inconsistent basis combination {bases}: |<P>| = {value} is not 1")]
    InconsistentCombo { bases: String, value: f64 },

    #[error("adversary holds no knowledge about round {round}")]
    NoKnowledge { round: u64 },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, QssError>;
