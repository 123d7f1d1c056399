use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulation and reconstruction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "ensemble generation aborted after {trials} trials with only {accepted} of {target} heralded samples"
    )]
    AbortedAfterMaxTrials { trials: u64, accepted: usize, target: usize },

    #[error("heralded ensemble is empty")]
    EmptyEnsemble,

    #[error("histogram grid too narrow: {fraction:.4} of samples fell outside [{q_min}, {q_max}]")]
    GridTooNarrow { fraction: f64, q_min: f64, q_max: f64 },

    #[error("quadrature grid does not match the pattern table: {0}")]
    GridMismatch(String),

    #[error("phase sweep covers [{first:.6}, {last:.6}] rad, need [0, pi]")]
    SweepIncomplete { first: f64, last: f64 },

    #[error("truncation of {requested} modes exceeds the stable range of {limit}")]
    TruncationTooLarge { requested: usize, limit: usize },

    #[error("design matrix condition number {0:.3e} exceeds 1e8")]
    IllConditioned(f64),

    #[error("malformed {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn parse(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Parse { what, detail: detail.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
