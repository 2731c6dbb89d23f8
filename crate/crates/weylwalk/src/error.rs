use thiserror::Error;

/// Errors from walk construction and analysis.
#[derive(Debug, Error)]
pub enum WalkError {
    #[error("coin support is empty")]
    EmptySupport,
    #[error("displacement vector {q:?} has {found} components, expected {expected}")]
    DisplacementDimension { q: Vec<i64>, expected: usize, found: usize },
    #[error("coin at {q:?} is {rows}×{cols}, expected {k}×{k}")]
    CoinShape { q: Vec<i64>, k: usize, rows: usize, cols: usize },
    #[error("lattice scale must be positive, got a = {a}, dt = {dt}")]
    BadScale { a: f64, dt: f64 },
    #[error("eigenphase {eigenphase} of W sits on the ±π branch cut of the matrix logarithm")]
    BranchAmbiguity { eigenphase: f64 },
    #[error("eigenvector matrix is numerically singular")]
    SingularEigenbasis,
    #[error("operation requires a 2-level internal space, got k = {k}")]
    UnsupportedInternalDim { k: usize },
    #[error("operation requires d = {expected} spatial dimensions, got d = {found}")]
    UnsupportedSpatialDim { expected: usize, found: usize },
    #[error("cutoff Λ = {lambda} is not inside the Brillouin zone (π/a = {limit})")]
    CutoffOutsideZone { lambda: f64, limit: f64 },
    #[error("Λa = {lambda_a} violates the bound's validity condition Λa ≤ 1/(K·qmax) = {limit}")]
    BoundValidity { lambda_a: f64, limit: f64 },
    #[error("total time {t} is not an integer number of timesteps dt = {dt}")]
    NonIntegerSteps { t: f64, dt: f64 },
    #[error("walk is exactly solvable at this cutoff: all sampled norms vanish, no fit possible")]
    ExactlySolvable,
    #[error("need at least {needed} schedule points for a fit, got {got}")]
    ScheduleTooShort { needed: usize, got: usize },
    #[error("packet width σ_x = {sigma} must span at least {min_sites} lattice sites (a = {a})")]
    PacketTooNarrow { sigma: f64, a: f64, min_sites: usize },
    #[error("momentum box of {sites} sites × a = {a} is smaller than 20σ_x = {needed}")]
    BoxTooSmall { sites: usize, a: f64, needed: f64 },
    #[error("internal state has {found} components, expected k = {expected}")]
    InternalStateDimension { expected: usize, found: usize },
    #[error("momentum vector has {found} components, expected d = {expected}")]
    MomentumDimension { expected: usize, found: usize },
}
