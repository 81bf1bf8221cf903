//! Crate-wide error type. Diagnostic payloads (violations, residuals) are
//! carried as `f64` regardless of the scalar type in use.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point must be nonzero")]
    ZeroPoint,

    #[error("coordinates must be finite")]
    NonFinitePoint,

    #[error("no admissible scaling found within budget (best violation {violation:.6e})")]
    NotInCone { violation: f64 },

    #[error("operation requires the balanced flag on the region")]
    NotBalanced,

    #[error("gauge bracketing failed within the sample annulus bounds")]
    BracketingFailed,

    #[error("root finding did not converge (best residual {residual:.3e})")]
    RootsDidNotConverge { residual: f64 },

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("disc constant term does not match the required center")]
    CenterMismatch,

    #[error("reduction drives the scale component to zero at the origin")]
    DegenerateReduction,

    #[error("scale component has a root within {tol:.1e} of the unit circle")]
    RootNearCircle { tol: f64 },

    #[error(
        "disc boundary leaves the admissible cone at {violating_nodes} of {nodes} nodes \
         (total violation {total_violation:.6e})"
    )]
    InfeasibleBoundary {
        violating_nodes: usize,
        nodes: usize,
        total_violation: f64,
    },

    #[error("no feasible disc found at any degree (best penalty residual {residual:.6e})")]
    NoFeasibleDisc { residual: f64 },

    #[error("optimizer budget exhausted before any feasible disc was found")]
    BudgetExhausted,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature node count must be a power of two, got {0}")]
    BadQuadratureSize(usize),

    #[error("unknown reference case `{0}`")]
    UnknownCase(String),

    #[error("hull oracle supports dimension 2 only, got {0}")]
    HullDimension(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
