use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("ensemble is empty")]
    EmptyEnsemble,

    #[error("quadrature did not converge for n = {entries:?} (estimated error {estimate:e})")]
    Quadrature { entries: Vec<usize>, estimate: f64 },

    #[error("profile covers r <= {r_max} but the overlap region extends to {required}")]
    InsufficientCoverage { r_max: f64, required: f64 },

    #[error("fock cutoff too small: discarded weight {tail:e} exceeds {bound:e}")]
    Cutoff { tail: f64, bound: f64 },

    #[error("{flagged} of {total} trajectories drifted beyond the conservation bound")]
    TrajectoryDrift { flagged: usize, total: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
