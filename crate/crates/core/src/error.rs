use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid billiard: {0}")]
    InvalidBilliard(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no real tangent from ({x}, {y}) to the caustic")]
    NoTangent { x: f64, y: f64 },
    #[error("line is not tangent to the conic (residual {0:e})")]
    NotTangent(f64),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("no root matching {0}")]
    NoRoot(String),
    #[error("ill-conditioned polynomial: {0}")]
    IllConditioned(String),
    #[error("family does not exist: {0}")]
    FamilyNonexistent(String),
    #[error("no periodic orbit found: {0}")]
    NotFound(String),
    #[error("tangential ray has no second intersection")]
    Tangential,
    #[error("{code} is not applicable to {topology}")]
    Applicability { code: String, topology: String },
    #[error("no closed form for {code} on {topology}")]
    NotDerived { code: String, topology: String },
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// True for errors that mean "this family or configuration cannot exist".
    pub fn is_nonexistence(&self) -> bool {
        matches!(self, Error::FamilyNonexistent(_) | Error::NoRoot(_))
    }
}
