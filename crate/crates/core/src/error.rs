use thiserror::Error;

/// Errors raised by the library. Every variant carries a module-qualified code
/// (see [`Error::code`]) so front ends can report failures uniformly.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed step set: {0}")]
    MalformedSpec(String),
    #[error("step set has no negative step")]
    NoNegativeStep,
    #[error("step set has no positive step")]
    NoPositiveStep,
    #[error("step {0} has zero weight")]
    ZeroWeight(i64),
    #[error("step polynomial needs a positive argument, got {0}")]
    NonpositiveArgument(String),

    #[error("memory budget exceeded: need about {required} bytes, budget is {budget}")]
    OutOfMemoryBudget { required: u64, budget: u64 },

    #[error("order {0} is out of the computed range")]
    OrderOutOfRange(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("could not bracket the critical point of the step polynomial")]
    BracketFailure,
    #[error("small/large branch classification is ambiguous at z={z} (modulus gap {gap:e})")]
    ClassificationAmbiguity { z: f64, gap: f64 },
    #[error("kernel linear system is ill-conditioned (condition estimate {0:e})")]
    IllConditioned(f64),
    #[error("root finder did not converge: {0}")]
    RootFindFailure(String),
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::MalformedSpec(_) => "steps.MalformedSpec",
            Error::NoNegativeStep => "steps.NoNegativeStep",
            Error::NoPositiveStep => "steps.NoPositiveStep",
            Error::ZeroWeight(_) => "steps.ZeroWeight",
            Error::NonpositiveArgument(_) => "steps.NonpositiveArgument",
            Error::OutOfMemoryBudget { .. } => "enumerate.OutOfMemoryBudget",
            Error::OrderOutOfRange(_) => "limits.OrderOutOfRange",
            Error::InternalInconsistency(_) => "limits.InternalInconsistency",
            Error::BracketFailure => "kernel.BracketFailure",
            Error::ClassificationAmbiguity { .. } => "kernel.ClassificationAmbiguity",
            Error::IllConditioned(_) => "kernel.IllConditioned",
            Error::RootFindFailure(_) => "kernel.RootFindFailure",
            Error::Precondition(_) => "kernel.Precondition",
            Error::Config(_) => "cli.Config",
        }
    }

    /// True for failures caused by a resource cap rather than by invalid input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::OutOfMemoryBudget { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
