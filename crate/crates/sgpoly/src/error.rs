use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular system for degree j={j}, k={k} at r={r}")]
    Degenerate { j: usize, k: usize, r: String },

    #[error("pivot below the precision threshold for j={j}, k={k} at r={r}; rerun with the exact backend")]
    Precision { j: usize, k: usize, r: String },

    #[error("inconsistent system for j={j}, k={k} at r={r}: leftover residual {residual}")]
    Inconsistent { j: usize, k: usize, r: String, residual: String },

    #[error("monomial table holds degrees up to {have}, need {need}")]
    Depth { have: usize, need: usize },

    #[error("no value stored at vertex {0}")]
    MissingValue(String),

    #[error("junction value mismatch at vertex {0}")]
    Junction(String),

    #[error("no admissible root below lambda={lambda} at r={r}")]
    RootNotFound { lambda: String, r: String },

    #[error("decimation did not converge after {iterations} steps (seed={seed}, r={r})")]
    NonConvergence { seed: String, r: String, iterations: usize, trajectory: Vec<f64> },
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Depth { .. } | Error::MissingValue(_) => 2,
            Error::NonConvergence { .. } | Error::RootNotFound { .. } => 4,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
