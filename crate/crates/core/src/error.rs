use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Solver,
    Certificate,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("factor {factor} has a nonreal root")]
    ComplexRoot { factor: usize },
    #[error("factor {factor} has a root at {root} outside the interval [{a}, {b}]")]
    RootOutsideInterval { factor: usize, root: f64, a: f64, b: f64 },
    #[error("degenerate interval [{0}, {1}]")]
    DegenerateInterval(f64, f64),
    #[error("pole at {0} coincides with a gap endpoint")]
    PoleOnBoundary(f64),
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),
    #[error("no feasible support configuration found: {0}")]
    NoFeasibleSupport(String),
    #[error("equilibrium mass deviates from one: {0}")]
    MassDeviation(f64),
    #[error("equilibrium constancy violated, residual {0:e}")]
    ConstancyViolation(f64),
    #[error("moment system is numerically singular")]
    SingularMomentSystem,
    #[error("bound coefficient {0} is not below one")]
    BoundViolation(f64),
    #[error("sieve limit {0} is too small")]
    LimitTooSmall(u64),
    #[error("expansion would exceed the term budget ({0} terms)")]
    BudgetExceeded(usize),
    #[error("certificate is not a positive integer: {0}")]
    NonIntegerCertificate(String),
    #[error("certificate check failed: {0}")]
    CertificateMismatch(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Invalid(_)
            | Error::ComplexRoot { .. }
            | Error::RootOutsideInterval { .. }
            | Error::DegenerateInterval(..)
            | Error::PoleOnBoundary(_)
            | Error::LimitTooSmall(_)
            | Error::BudgetExceeded(_) => ErrorKind::Validation,
            Error::QuadratureNonConvergence(_)
            | Error::NoFeasibleSupport(_)
            | Error::MassDeviation(_)
            | Error::ConstancyViolation(_)
            | Error::SingularMomentSystem
            | Error::BoundViolation(_) => ErrorKind::Solver,
            Error::NonIntegerCertificate(_) | Error::CertificateMismatch(_) => ErrorKind::Certificate,
        }
    }
}
