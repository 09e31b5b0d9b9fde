use core::fmt;

/// Errors raised by the core routines.
///
/// Singular information matrices are usually reported as values (see
/// [`crate::KwCertificate::singular`]); [`Error::Singular`] is only used
/// where an inverse is genuinely required.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A non-finite number where a finite one is required.
    NonFinite,
    InvalidParameters(&'static str),
    /// A pair that is not `1 ≤ i < j ≤ m`.
    InvalidPair { i: usize, j: usize, m: usize },
    InvalidDesign(&'static str),
    DimensionMismatch { expected: usize, found: usize },
    InvalidPermutation,
    /// The information matrix is not positive definite.
    Singular,
    /// Brute-force enumeration requested beyond the supported size.
    TooLarge { m: usize, max: usize },
    /// An operation that only exists for four alternatives.
    NotFourAlternatives(usize),
    /// Missing pairs that do not belong to the requested symmetry orbit.
    WrongOrbit,
    /// A closed-form design claimed optimality that its certificate refutes.
    InconsistentClosedForm(&'static str),
    /// No region certified the parameter point.
    ClassificationFailed,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite => write!(f, "non-finite value"),
            Error::InvalidParameters(msg) => write!(f, "invalid parameters: {msg}"),
            Error::InvalidPair { i, j, m } => {
                write!(f, "invalid pair ({i},{j}) for {m} alternatives")
            }
            Error::InvalidDesign(msg) => write!(f, "invalid design: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidPermutation => write!(f, "not a permutation"),
            Error::Singular => write!(f, "information matrix is singular"),
            Error::TooLarge { m, max } => {
                write!(f, "m = {m} exceeds the enumeration limit of {max}")
            }
            Error::NotFourAlternatives(m) => {
                write!(f, "closed forms exist only for m = 4, got m = {m}")
            }
            Error::WrongOrbit => write!(f, "missing pairs are not in the requested orbit"),
            Error::InconsistentClosedForm(which) => {
                write!(f, "closed-form {which} design failed its optimality certificate")
            }
            Error::ClassificationFailed => write!(f, "no optimality region certified the point"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
