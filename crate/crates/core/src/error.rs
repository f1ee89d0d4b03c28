use std::path::PathBuf;

use thiserror::Error;

use crate::cpn::ColourSet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StochasticError {
    #[error("empty interval [{lo}, {hi}]")]
    EmptyInterval { lo: i64, hi: i64 },
    #[error("variance must be finite and non-negative, got {0}")]
    BadVariance(f64),
    #[error("mean must be finite and positive, got {0}")]
    BadMean(f64),
    #[error("probability must lie in [0, 1], got {0}")]
    BadProbability(f64),
}

/// Failure inside an output-arc expression.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Stochastic(#[from] StochasticError),
    #[error("tile {0} has no node type assigned")]
    UnassignedTile(u32),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("duplicate place `{0}`")]
    DuplicatePlace(String),
    #[error("duplicate transition `{0}`")]
    DuplicateTransition(String),
    #[error("duplicate variable `{var}` on transition `{transition}`")]
    DuplicateVariable { transition: String, var: String },
    #[error("place `{place}` holds {expected:?} tokens, got {found}")]
    ColourMismatch {
        place: String,
        expected: ColourSet,
        found: String,
    },
    #[error("place `{place}` is {}; token timestamp {}", if *.timed { "timed" } else { "untimed" }, if *.timed { "missing" } else { "not allowed" })]
    TimestampMismatch { place: String, timed: bool },
    #[error("marking has {found} places, net has {expected}")]
    MarkingShape { expected: usize, found: usize },
    #[error("cannot remove {count} x {token} from place `{place}`")]
    MissingTokens {
        place: String,
        token: String,
        count: u64,
    },
    #[error("transition `{transition}` is not enabled under the given binding at time {now}")]
    NotEnabled { transition: String, now: u64 },
    #[error("arc expression on `{transition}` failed: {source}")]
    Expression {
        transition: String,
        #[source]
        source: ExprError,
    },
    #[error("step limit of {limit} exceeded at time {now}")]
    StepLimit { limit: u64, now: u64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid scene configuration: {0}")]
    Scene(String),
    #[error("invalid scenario parameters: {0}")]
    Params(String),
    #[error("invalid experiment plan: {0}")]
    Plan(String),
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl IoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        IoError::Csv {
            path: path.into(),
            source,
        }
    }
}

/// Failure of a single simulated replication.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Net(#[from] NetError),
}
