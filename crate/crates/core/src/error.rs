use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector norm {norm:e} is too small to normalize")]
    ZeroVector { norm: f64 },

    #[error("dimension {got} is not supported here (expected {expected})")]
    UnsupportedDimension { got: usize, expected: String },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not a rotation: {0}")]
    NotARotation(String),

    #[error("support-function boundary has negative enclosed area {area:e}")]
    NonConvexSupport { area: f64 },

    #[error("shadow kinds differ: {left:?} vs {right:?}")]
    KindMismatch {
        left: crate::shadows::ShadowKind,
        right: crate::shadows::ShadowKind,
    },

    #[error("degenerate configuration: {0}")]
    DegenerateConfig(String),

    #[error("convexity check failed between directions {p:?} and {q:?} (excess {excess:e})")]
    ConvexityFailure {
        p: Vec<f64>,
        q: Vec<f64>,
        excess: f64,
    },

    #[error("hypothesis failed in direction {direction:?} (best margin {margin:e})")]
    HypothesisFailed { direction: Vec<f64>, margin: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("parse error: {0}")]
    Parse(String),
}
