use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("spectral parameter {lambda} lies on the branch cut [0, inf)")]
    Branch { lambda: f64 },
    #[error("spectral parameter {lambda} is not in the Dirichlet resolvent set (-inf, 0)")]
    OutOfResolvent { lambda: f64 },
    #[error("lower bound not applicable: m(theta) = {m_theta} <= -m(A0) = {neg_m_a0}")]
    Inapplicable { m_theta: f64, neg_m_a0: f64 },
    #[error("degenerate normalization: {0}")]
    Degenerate(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("CFL violation: dt = {dt} exceeds 0.5 dx = {limit}")]
    Stability { dt: f64, limit: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Non-fatal diagnostics attached to numerical results.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// A sampled function has not decayed at the edge of its window, so
    /// quadrature over the truncated window misses part of its mass.
    Truncation { what: String, edge_value: f64 },
}
