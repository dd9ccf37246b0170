use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library. Variant names are stable: the CLI reports
/// them verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different backends ({0} vs {1})")]
    BackendMismatch(String, String),
    #[error("{0} has no inverse among finite Puiseux polynomials")]
    NotInvertible(String),
    #[error("invalid field specification: {0}")]
    InvalidField(String),
    #[error("Laurent polynomial has a pole at the point {0}")]
    PoleAtPoint(String),
    #[error("operation requires a plain polynomial (no negative exponents)")]
    NotPlainPolynomial,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("all homogeneous coordinates vanish")]
    ZeroTuple,
    #[error("point lies outside the domain: {0}")]
    DomainViolation(String),
    #[error("image meets a pole of the outer map: {0}")]
    PoleHit(String),
    #[error("invalid PGL(2) generator: {0}")]
    InvalidGenerator(String),
    #[error("unsupported map for point images: {0}")]
    UnsupportedImage(String),
    #[error("the zero series has no tropicalization")]
    ZeroSeries,
    #[error("{0}")]
    OutOfDomain(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("curve model is not projective")]
    NotProjective,
    #[error("inconsistent curve model: {0}")]
    InconsistentModel(String),
    #[error("curve model has no nodes")]
    NoNodes,
    #[error("skeleton is empty")]
    EmptySkeleton,
    #[error("empty skeleton: the curve is not Cherry hyperbolic")]
    NotHyperbolic,
    #[error("unknown name: {0}")]
    UnknownMark(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("Fubini-Study derivative does not explode at index {0}")]
    NoExplosion(u32),
    #[error("magnitude {0} is not in the value group")]
    RadiusNotInValueGroup(String),
    #[error("magnitudes over {0} need a numeric base")]
    NonNumericBase(String),
}

impl Error {
    /// Stable identifier of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::BackendMismatch(..) => "BackendMismatch",
            Error::NotInvertible(_) => "NotInvertible",
            Error::InvalidField(_) => "InvalidField",
            Error::PoleAtPoint(_) => "PoleAtPoint",
            Error::NotPlainPolynomial => "NotPlainPolynomial",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::ZeroTuple => "ZeroTuple",
            Error::DomainViolation(_) => "DomainViolation",
            Error::PoleHit(_) => "PoleHit",
            Error::InvalidGenerator(_) => "InvalidGenerator",
            Error::UnsupportedImage(_) => "UnsupportedImage",
            Error::ZeroSeries => "ZeroSeries",
            Error::OutOfDomain(_) => "OutOfDomain",
            Error::PreconditionViolation(_) => "PreconditionViolation",
            Error::NotProjective => "NotProjective",
            Error::InconsistentModel(_) => "InconsistentModel",
            Error::NoNodes => "NoNodes",
            Error::EmptySkeleton => "EmptySkeleton",
            Error::NotHyperbolic => "NotHyperbolic",
            Error::UnknownMark(_) => "UnknownMark",
            Error::InvalidInput(_) => "InvalidInput",
            Error::NoExplosion(_) => "NoExplosion",
            Error::RadiusNotInValueGroup(_) => "RadiusNotInValueGroup",
            Error::NonNumericBase(_) => "NonNumericBase",
        }
    }
}
