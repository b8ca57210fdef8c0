use thiserror::Error;

/// Errors raised by seminorm, lattice and projection operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("exponent must satisfy r >= 1, got {0}")]
    ExponentRange(f64),

    #[error("jump threshold must be positive, got {0}")]
    ThresholdRange(f64),

    #[error("index set must contain at least 2 points")]
    IndexSetTooSmall,

    #[error("index set contains a duplicate point")]
    DuplicateIndex,

    #[error("expected a {expected}-parameter family, got {got} parameters")]
    ParameterMismatch { expected: usize, got: usize },

    #[error("sequence must be strictly increasing in every coordinate")]
    NotStrictlyIncreasing,

    #[error("sequence must contain at least 2 entries")]
    SequenceTooShort,

    #[error("sequence entry is not a member of the index set")]
    EntryOutsideIndexSet,

    #[error("subdomain point is not a member of the index set")]
    SubdomainOutsideIndexSet,

    #[error("brute-force enumeration refused: {0} points exceed the cap of {1}")]
    BruteForceTooLarge(usize, usize),

    #[error("index set is not a product grid")]
    NotProductGrid,

    #[error("cannot parse '{0}' as an exact rational")]
    RationalParse(String),

    #[error("rational component out of representable range: {0}")]
    RationalRange(String),

    #[error("polynomial must vanish at the origin")]
    NonzeroAtOrigin,

    #[error("polynomial arity mismatch: polynomial has {poly} variables, point has {point}")]
    ArityMismatch { poly: usize, point: usize },

    #[error("averaging box must be nonempty")]
    EmptyBox,

    #[error("orbit point does not fit in 64-bit coordinates")]
    OrbitOverflow,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operation requires a cyclic space")]
    NotCyclic,

    #[error("operation requires a lattice space")]
    NotLattice,

    #[error("level {0} outside filtration range 0..={1}")]
    LevelRange(u32, u32),

    #[error("projection index {0} out of range (family has {1} indices)")]
    ProjectionIndexRange(usize, usize),

    #[error("intermediate index must lie strictly inside the block")]
    IndexNotInsideBlock(String),

    #[error("factors do not commute: probe deviation {0:.3e} exceeds tolerance {1:.3e}")]
    NonCommutingFactors(f64, f64),

    #[error("point is not coordinatewise below the target index")]
    NotBelowTarget,

    #[error("index grid does not refine the dyadic blocks it meets")]
    GridNotDyadicRefining,

    #[error("lacunary ratio must exceed 1, got {0}")]
    LacunaryRatio(f64),

    #[error("M list must be strictly increasing with at least 2 entries")]
    BadMList,

    #[error("orthonormal system vectors must be nonempty and of equal length")]
    BadSystem,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
