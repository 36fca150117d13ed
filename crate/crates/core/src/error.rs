use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in `{node}` at {point}")]
    Domain { node: String, point: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("quadrature not converged after {panels} panels (error estimate {estimate:e})")]
    QuadratureNotConverged { panels: usize, estimate: f64 },
    #[error("form is not closed (max residual {residual:e})")]
    NotClosed { residual: f64 },
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("singular linear system (pivot ratio {pivot_ratio:e})")]
    SingularSystem { pivot_ratio: f64 },
    #[error("potential mismatch: max |dnu - omega| = {residual:e}")]
    PotentialMismatch { residual: f64 },
    #[error("twist form is not closed (max residual {residual:e})")]
    TwistNotClosed { residual: f64 },
    #[error("image escapes the domain at {point}")]
    ImageEscapesDomain { point: String },
    #[error("map is not scale symplectic (residual {residual:e})")]
    NotScaleSymplectic { residual: f64 },
    #[error("base mismatch: {0}")]
    BaseMismatch(String),
    #[error("reference form is not a symplectic potential (residual {residual:e})")]
    NotAPotential { residual: f64 },
    #[error("degenerate pullback (min |top power| = {min_top:e})")]
    DegeneratePullback { min_top: f64 },
    #[error("vector is not in the contact hyperplane (|xi(u)| = {value:e})")]
    NotInContactHyperplane { value: f64 },
    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),
    #[error("curve is not tangent to the contact structure: residual {residual:e} on piece {piece} at t = {t}")]
    TangencyViolation { residual: f64, piece: usize, t: f64 },
    #[error("chain parameter {t} outside (0, 1)")]
    ParamOutOfRange { t: f64 },
    #[error("intermediate point {point} escapes the box")]
    IntermediatePointEscapes { point: String },
    #[error("parse error at line {line}, column {column} near `{token}`: {message}")]
    Parse {
        line: usize,
        column: usize,
        token: String,
        message: String,
    },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("arity mismatch for `{name}`: expected {expected}, found {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Stable variant name, used by reports and expected-failure checks.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "DomainError",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::QuadratureNotConverged { .. } => "QuadratureNotConverged",
            Error::NotClosed { .. } => "NotClosed",
            Error::UnsupportedDomain(_) => "UnsupportedDomain",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::SingularSystem { .. } => "SingularSystem",
            Error::PotentialMismatch { .. } => "PotentialMismatch",
            Error::TwistNotClosed { .. } => "TwistNotClosed",
            Error::ImageEscapesDomain { .. } => "ImageEscapesDomain",
            Error::NotScaleSymplectic { .. } => "NotScaleSymplectic",
            Error::BaseMismatch(_) => "BaseMismatch",
            Error::NotAPotential { .. } => "NotAPotential",
            Error::DegeneratePullback { .. } => "DegeneratePullback",
            Error::NotInContactHyperplane { .. } => "NotInContactHyperplane",
            Error::DegenerateDirection(_) => "DegenerateDirection",
            Error::TangencyViolation { .. } => "TangencyViolation",
            Error::ParamOutOfRange { .. } => "ParamOutOfRange",
            Error::IntermediatePointEscapes { .. } => "IntermediatePointEscapes",
            Error::Parse { .. } => "ParseError",
            Error::UnknownName(_) => "UnknownName",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::Config(_) => "ConfigError",
        }
    }

    pub(crate) fn domain(node: impl Into<String>, point: &[crate::C64]) -> Self {
        Error::Domain {
            node: node.into(),
            point: crate::holoalg::format_point(point),
        }
    }
}
