use thiserror::Error;

/// Errors produced by the evaluation and verification kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{function} has a pole at s = {re}{im:+}i")]
    Pole {
        function: &'static str,
        re: f64,
        im: f64,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("coefficient overflow at n = {0}")]
    Overflow(usize),
    #[error("missing a(p) for prime p = {0}")]
    MissingPrime(u64),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{needed} coefficients needed but only {available} available")]
    InsufficientCoefficients { needed: usize, available: usize },
    #[error("series tail bound {bound:e} exceeds tolerance {tol:e}")]
    TailBound { bound: f64, tol: f64 },
    #[error("Deligne bound violated at p = {0}; refusing to bound the series tail")]
    DeligneViolation(u64),
    #[error("function vanishes on the contour near s = {re}{im:+}i")]
    ZeroOnContour { re: f64, im: f64 },
    #[error("winding sum {0} is not close to an integer")]
    NonIntegerWinding(f64),
    #[error("search cap {0} reached")]
    SearchCap(u64),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
