use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: self-loop on node {label}")]
    SelfLoop { line: usize, label: u64 },

    #[error("node {label}: incoming weights sum to {sum}, which exceeds 1")]
    Normalization { label: u64, sum: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("instance too large for enumeration: {count} realizations exceed the cap of {cap}")]
    TooLargeForEnumeration { count: u128, cap: u64 },

    #[error("p_max too small: no stopping decision within {samples} samples (p_max <= {upper_bound:.3e})")]
    PMaxTooSmall { upper_bound: f64, samples: u64 },

    #[error("p_max indistinguishable from zero: none of {samples} sampled realizations is type-1")]
    ZeroPmax { samples: u64 },

    #[error("infeasible cover instance: p = {p} but only {available} type-1 traces")]
    InfeasibleCover { p: u64, available: u64 },

    #[error("exact cover solver gave up: {0}")]
    Intractable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parameter solve failed: {0}")]
    ParamSolve(String),
}

pub type Result<T> = std::result::Result<T, Error>;
