use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("dimension mismatch in {what}: expected length {expected}, found {found}")]
pub struct DimensionError {
    pub what: &'static str,
    pub expected: usize,
    pub found: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("dp requires integer weights; use brute force")]
    NonIntegerWeights,
    #[error("brute force refuses {0} items (limit {limit})", limit = crate::exact::BRUTE_FORCE_LIMIT)]
    TooManyItems(usize),
    #[error("dp table of {0} cells exceeds the size limit")]
    TableTooLarge(u128),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaError {
    #[error("invalid GA parameters: {0}")]
    InvalidParams(String),
    #[error("fewer than two feasible vectors after {retries} population draws")]
    InitializationFailed { retries: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error("unknown scenario {0}")]
    UnknownScenario(u8),
    #[error("invalid scenario config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Ga(#[from] GaError),
    #[error("agent {agent_id}: {source}")]
    AgentInit { agent_id: usize, source: GaError },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
}
