use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("polynomial is not monic")]
    NonMonic,
    #[error("degree must be at least 2")]
    DegenerateDegree,
    #[error("polynomial is reducible: {0}")]
    ReducibleDetected(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero vector")]
    ZeroVector,
    #[error("pair is degenerate: stacked constraint rows have rank {rank} < {expected}")]
    DegeneratePair { rank: usize, expected: usize },
    #[error("wedge vector is zero")]
    ZeroWedge,
    #[error("rows are linearly dependent")]
    DependentRows,
    #[error("lattice rank {0} exceeds exact enumeration limit")]
    RankTooLarge(usize),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("region is unbounded")]
    Unbounded,
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("{0} is not prime")]
    CompositeP(u64),
    #[error("{0} divides the discriminant")]
    BadPrime(u64),
    #[error("ideal is not squarefree")]
    NotSquarefree,
    #[error("factorization budget exceeded for {0}")]
    FactorizationBudget(String),

    #[error("empty slice")]
    EmptySlice,
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded(_) | Error::FactorizationBudget(_) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
