use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied argument violated an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A numerical identity that must hold by construction was violated.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    /// The coupling graph contains an odd cycle, listed as site indices.
    #[error("graph is not bipartite: odd cycle {cycle:?}")]
    NonBipartite { cycle: Vec<usize> },

    /// A least-squares fit could not be carried out or did not converge.
    #[error("fit failed: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
