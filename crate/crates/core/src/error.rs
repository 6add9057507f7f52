use thiserror::Error;

use crate::modular::ConditionReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix does not preserve the (d,2) form (residual {0:.3e})")]
    NotInGroup(f64),

    #[error("matrix is not a Lie algebra element of o(d,2) (residual {0:.3e})")]
    NotInAlgebra(f64),

    #[error("vector is not a null ray: {0}")]
    NotNull(String),

    #[error("unsupported region for this operation: {0}")]
    UnsupportedRegion(String),

    #[error("region is unbounded; a sampling box is required")]
    UnboundedRegion,

    #[error("rejection sampling gave up after {attempts} attempts ({accepted} accepted)")]
    SamplingExhausted { attempts: usize, accepted: usize },

    #[error("subspace is not standard (smallest K/iK angle {:.3e}, real dim {}, ambient dim {})",
        .0.min_angle(), .0.real_dim, .0.ambient_dim)]
    NotStandard(ConditionReport),

    #[error("zero vector among generators (index {0})")]
    ZeroGenerator(usize),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
