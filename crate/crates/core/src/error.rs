use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("field element {value} is not in [0, {modulus})")]
    FieldValueOutOfRange { value: u64, modulus: u64 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("field elements have different moduli ({0} vs {1})")]
    ModulusMismatch(u64, u64),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("classification precondition violated: {0}")]
    ClassPrecondition(String),
    #[error("graph matches none of the classes G0..G3 for the given pair")]
    Unclassified,
    #[error("LC orbit exceeds {0} graphs")]
    OrbitTooLarge(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("total dimension {0} exceeds the dense backend cap")]
    DimensionTooLarge(usize),
    #[error("pauli string does not satisfy g^d = 1 (residual phase exponent {0})")]
    PhaseConvention(u64),
    #[error("pauli strings do not commute")]
    NonCommuting,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("channel is not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),
    #[error("inconsistent inequality {name}: enumerated bound {enumerated} != tabulated {tabulated}")]
    InequalityChecksum {
        name: String,
        enumerated: f64,
        tabulated: f64,
    },
    #[error("unknown inequality {0}")]
    UnknownInequality(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::CompositeModulus(_) => "composite_modulus",
            Error::ModulusTooSmall(_) => "modulus_too_small",
            Error::FieldValueOutOfRange { .. } => "field_value_out_of_range",
            Error::ZeroInverse => "zero_inverse",
            Error::ModulusMismatch(..) => "modulus_mismatch",
            Error::VertexOutOfRange { .. } => "vertex_out_of_range",
            Error::SelfLoop(_) => "self_loop",
            Error::Disconnected => "disconnected",
            Error::TooFewVertices(_) => "too_few_vertices",
            Error::NotAdjacent(..) => "not_adjacent",
            Error::ClassPrecondition(_) => "class_precondition",
            Error::Unclassified => "unclassified",
            Error::OrbitTooLarge(_) => "orbit_too_large",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::DimensionTooLarge(_) => "dimension_too_large",
            Error::PhaseConvention(_) => "phase_convention",
            Error::NonCommuting => "non_commuting",
            Error::OutOfRange(_) => "out_of_range",
            Error::NotTracePreserving(_) => "not_trace_preserving",
            Error::InequalityChecksum { .. } => "inequality_checksum",
            Error::UnknownInequality(_) => "unknown_inequality",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}
