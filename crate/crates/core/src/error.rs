use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("course undefined at zero speed-over-ground")]
    CourseUndefined,

    #[error("line-of-sight direction undefined (distance to obstacle center {distance:e} m)")]
    LineOfSightUndefined { distance: f64 },

    #[error("numerical failure at SQP iteration {iteration}: {what}")]
    NumericalFailure {
        iteration: usize,
        what: String,
        /// Decision vector at the failing iterate.
        dump: Vec<f64>,
    },

    #[error("QP subproblem infeasible: {0}")]
    QpInfeasible(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported reference: {0}")]
    UnsupportedReference(String),

    #[error("nothing to plot")]
    NothingToPlot,

    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
