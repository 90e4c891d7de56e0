use thiserror::Error;

/// Errors raised by the simulator, protocol and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {n} exceeds the configured cap of {cap}")]
    QubitCap { n: usize, cap: usize },

    #[error("{what} index {index} out of range (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("probability {0} outside [0, 1]")]
    Probability(f64),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("secure aggregation needs at least 2 participants, got {0}")]
    TooFewParticipants(usize),

    #[error("shot plan needs an even shot count >= 2, got {0}")]
    ShotPlan(usize),

    #[error("every shot was discarded in the {basis} basis")]
    AggregationFailure { basis: &'static str },

    #[error("selection mask mismatch across clients")]
    MaskMismatch,

    #[error("infeasible partition: {0}")]
    InfeasiblePartition(String),

    #[error("switch round {t} exceeds the round count {rounds}")]
    SwitchRound { t: u64, rounds: u64 },

    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("feature file {path}: line {line}: {reason}")]
    FeatureFile {
        path: String,
        line: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
