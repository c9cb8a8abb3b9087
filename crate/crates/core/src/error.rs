use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square or has no rows")]
    NotSquare,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is singular")]
    SingularMap,
    #[error("root isolation could not certify radius {requested:e} (reached {reached:e})")]
    PrecisionExhausted { requested: f64, reached: f64 },
    #[error("eigenvalue disk around {modulus} cannot be separated from the unit circle")]
    NeutralSpectrum { modulus: f64 },
    #[error("characteristic polynomial {0} is reducible")]
    ReducibleSeed(String),
    #[error("cylinder length {cylinder} exceeds the diameter of a ball of radius {radius}")]
    WindowTooCoarse { cylinder: f64, radius: f64 },
    #[error("invalid ball: {0}")]
    InvalidBall(String),
    #[error("subshift is empty after pruning")]
    EmptyShift,
    #[error("subshift has no admissible infinite continuation")]
    DegenerateShift,
    #[error("power iteration did not reach tolerance {tolerance:e} (bracket {width:e})")]
    NotConverged { tolerance: f64, width: f64 },
    #[error("trace depth {depth} is too coarse for epsilon {epsilon}")]
    DepthTooCoarse { depth: u32, epsilon: f64 },
    #[error("grid incompatible with map: {0}")]
    IncompatibleGrid(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("entropy {entropy} outside [0, {max}]")]
    EntropyOutOfRange { entropy: f64, max: f64 },
    #[error("simple factor {factor} has rank {rank} < 2")]
    RankTooLow { factor: usize, rank: usize },
    #[error("invalid Cartan element: {0}")]
    InvalidElement(String),
    #[error("integer overflow: {0}")]
    Overflow(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
