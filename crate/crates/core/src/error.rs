use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("grid needs at least {min} points, got {got}")]
    GridTooSmall { min: usize, got: usize },

    #[error("grid point {point} lies inside the origin exclusion |x| < {radius}")]
    GridContainsOrigin { point: f64, radius: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid kinematics: {0}")]
    InvalidKinematics(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("probe is nonzero at index {index}, within {margin} points of a boundary or the origin gap")]
    ProbeSupport { index: usize, margin: usize },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("{modes} modes exceed the Fock-space cap of {cap}")]
    ModeCapExceeded { modes: usize, cap: usize },

    #[error("duplicate mode label {0}")]
    DuplicateMode(String),

    #[error("mode position x = {x} is not on the conjugate lattice of the momentum grid")]
    OffLattice { x: f64 },

    #[error("modes alias on the momentum grid: {0}")]
    AliasedModes(String),

    #[error("state has zero norm")]
    ZeroNormState,

    #[error("time function gradient failed at q = {q:?}, k = {k:?}: {reason}")]
    GradientFailure { q: Vec<f64>, k: Vec<f64>, reason: String },

    #[error("momentum k = {k} entered the exclusion band |k| < {band} at eps = {eps}")]
    ExclusionBandCrossed { eps: f64, k: f64, band: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
