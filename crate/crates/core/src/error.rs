use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A point or argument lies outside the space it was used with.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two points are not connected (disconnected graph component).
    #[error("no path between {from} and {to} in `{space}`")]
    NoPath {
        space: String,
        from: String,
        to: String,
    },

    /// A requested construction has no solution (e.g. T-function endpoint
    /// data violating the Lipschitz constraint, or an empty level set).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A ray hit the model's truncation before reaching the requested length.
    #[error("ray truncated at length {achieved} (requested {requested})")]
    TruncatedRay { achieved: f64, requested: f64 },

    /// Finite-horizon Busemann evaluation did not stabilize.
    #[error("horizon too short: Cauchy defect {defect} exceeds tolerance {tolerance}")]
    HorizonTooShort { defect: f64, tolerance: f64 },

    /// A constructed curve left the discretized set by more than the level
    /// tolerance; carries the offending sample.
    #[error("discretization error: {0}")]
    Discretization(String),

    /// Schema violation while loading a document; one message per offending field.
    #[error("schema error: {}", .0.join("; "))]
    Schema(Vec<String>),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }
}
