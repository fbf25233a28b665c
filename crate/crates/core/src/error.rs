use thiserror::Error;

use crate::phase::PhaseResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input outside the domain of a physical formula.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid geometry: {0}")]
    Construction(String),

    /// The two paths do not share x(t), so equal-time chords are not at fixed x.
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("static field (omega = {omega}) passed to the oscillatory phase engine; use static_phase")]
    StaticField { omega: f64 },

    #[error("quadrature did not converge: error estimate {:.3e} after {} nodes", best.quadrature_error_estimate, best.nodes_used)]
    Quadrature { best: Box<PhaseResult> },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
