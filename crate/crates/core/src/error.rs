use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot parse scalar {0:?}")]
    ParseScalar(String),
    #[error("comparison tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("invalid interval {0}")]
    InvalidInterval(String),
    #[error("operation undefined on the empty set")]
    EmptySet,
    #[error("{value} is outside the domain {domain}")]
    Domain { value: String, domain: &'static str },
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid IFS: {0}")]
    InvalidIfs(String),
    #[error("invalid breakpoints: {0}")]
    InvalidBreakpoints(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("iteration did not settle within {0} steps")]
    IterationCap(usize),
    #[error("{what} exceeds the configured cap of {cap}")]
    CapExceeded { what: &'static str, cap: usize },
    #[error("preimage of {0} contains an interval (plateau hit)")]
    NonDiscretePreimage(String),
    #[error("preimage of {0} is not exactly representable")]
    InexactPreimage(String),
    #[error("{0} requires the exact backend")]
    RequiresExact(&'static str),
    #[error("preimage set Q is truncated; the quasi-partition is undefined")]
    IncompleteQ,
    #[error("image of partition interval {0} straddles Q")]
    PartitionInvarianceViolation(usize),
    #[error("bound violated: {0}")]
    BoundViolation(String),
    #[error("iterated map is neither left- nor right-continuous at {0}")]
    PowerMapDiscontinuity(String),
    #[error("inconsistent state: {0}")]
    Inconsistent(String),
}
