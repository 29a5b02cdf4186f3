use thiserror::Error;

use crate::rule::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("order {order} exceeds the enumeration cap {cap}")]
    CapExceeded { order: usize, cap: usize },

    #[error("order {0} is outside the supported range 1..=11")]
    UnsupportedOrder(usize),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid rule: {0}")]
    InvalidRule(ValidationReport),

    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("rooted graph is not twinfree")]
    NotTwinfree,

    #[error("rule is not symmetric")]
    NotSymmetric,

    #[error("no perturbation case applies to this symmetric non-deterministic rule")]
    UncoveredCase,

    #[error("internal error: {0}")]
    Internal(String),

    #[error("integration left [0,1] by {overshoot:e} at t = {t}")]
    Drift { t: f64, overshoot: f64 },

    #[error("vertex count {n} exceeds the configured maximum {max}")]
    TooLarge { n: usize, max: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by a resource cap rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::TooLarge { .. })
    }
}
