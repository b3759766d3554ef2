use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// The logarithm map was requested at or beyond the cut locus, where it
    /// is undefined (or not unique). We never silently pick a branch.
    #[error("cut locus: {context} (separation {dist})")]
    CutLocus { context: &'static str, dist: f64 },

    /// An operation was called with arguments violating its contract,
    /// e.g. tangents anchored at different base points.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A scalar argument lies outside the formula's domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("graph is not connected")]
    DisconnectedGraph,

    #[error("infeasible topology: {0}")]
    InfeasibleTopology(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
