use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse law spec `{spec}`: {reason}")]
    LawParse { spec: String, reason: String },

    #[error("step law has non-negative mean {mean}; a negative drift is required")]
    NegDriftViolated { mean: f64 },

    #[error("Cramér condition fails: mgf stays below 1 up to s = {searched_to}")]
    NoRoot { searched_to: f64 },

    #[error("path {path}: level not crossed within {max_steps} steps")]
    HitCapExceeded { path: u64, max_steps: u64 },

    #[error("path {path}: tilted rejection sampler exceeded {max_trials} trials")]
    RejectionCapExceeded { path: u64, max_trials: u64 },

    #[error("exact lattice terms requested for a non-lattice law")]
    ExactUnavailable,

    #[error("lattice support of {len} points exceeds the cap of {cap}")]
    SupportOverflow { len: usize, cap: usize },

    #[error("absorbing recursion did not converge after {iterations} iterations (unabsorbed mass {remaining:e})")]
    NonConvergence { iterations: usize, remaining: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("coordinate {index} is constant across the sample")]
    DegenerateCoordinate { index: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad configuration rather than by a run.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::LawParse { .. }
                | Error::NegDriftViolated { .. }
                | Error::NoRoot { .. }
                | Error::ExactUnavailable
        )
    }
}
