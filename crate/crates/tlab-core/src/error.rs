use alloc::string::String;

use crate::template::Violation;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TemplateError {
    #[error("invalid template: {0}")]
    Invalid(Violation),
    #[error("need at least 2 walls, got {0}")]
    TooFewWalls(usize),
    #[error("scale factor must be positive, got {0}")]
    BadScale(f64),
    #[error("self-similar data needs beta in (0,π) and positive widths")]
    BadSelfSimilar,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DevelopError {
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error("expected {expected} signs, got {got}")]
    SignCount { expected: usize, got: usize },
    #[error("need at least {min} origins, got {got}")]
    TooFewOrigins { min: usize, got: usize },
    #[error("self-similarity equation violated (defect {defect:e})")]
    Inconsistent { defect: f64 },
    #[error("quarter planes of this case do not carry the geodesic between consecutive even origins")]
    InvalidCase,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeodesicError {
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Develop(#[from] DevelopError),
    #[error("depth must be at least 2, got {0}")]
    DepthTooSmall(usize),
    #[error("template has {walls} walls; depth {depth} needs {needed}")]
    TooShallow { walls: usize, depth: usize, needed: usize },
    #[error("branch cap {cap} exceeded at wall {wall}")]
    BranchOverflow { cap: usize, wall: usize },
    #[error("point cannot be located: {0}")]
    Unlocatable(&'static str),
    #[error("no valid path found between the points")]
    NoPath,
    #[error("oracle truncation radius too small")]
    TruncationTooSmall,
    #[error("mesh step must be positive")]
    BadMesh,
    #[error("horizon {horizon} beyond traced depth")]
    HorizonBeyondTrace { horizon: f64 },
    #[error("infeasible configuration: {0}")]
    Infeasible(&'static str),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SelfSimilarError {
    #[error("psi pair outside the open square (−π/2, π/2)²")]
    OutsideSquare,
    #[error("beta must lie in (0, π)")]
    BadBeta,
    #[error(transparent)]
    Develop(#[from] DevelopError),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecoveryError {
    #[error("degenerate oracle: {0}")]
    Degenerate(&'static str),
    #[error("probe budget exhausted after {0} calls")]
    BudgetExhausted(usize),
    #[error("inconsistent oracle (residual {0:e})")]
    Inconsistent(f64),
    #[error("invalid geometric data: {0}")]
    InvalidData(&'static str),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("graph needs at least one edge")]
    NoEdges,
    #[error("graph is not connected")]
    Disconnected,
    #[error("edge angle out of (0,π) at edge {0}")]
    BadAngle(usize),
    #[error("invalid vertex data at vertex {0}")]
    BadVertexData(String),
    #[error("(p,q,r,s) must have p > 0 and r > 0")]
    OutsideDomain,
    #[error("itinerary edges {0} and {1} share no vertex")]
    NotAdjacent(usize, usize),
    #[error("itinerary is empty")]
    EmptyItinerary,
    #[error(transparent)]
    Template(#[from] TemplateError),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TorusError {
    #[error("horizon exponents must satisfy 1 <= k_min <= k_max <= 16")]
    BadHorizon,
    #[error("ray direction must lie in (0, π/2)")]
    BadDirection,
    #[error("development check failed: {0}")]
    Shoot(crate::geodesic::ShootFailure),
}
