use num_complex::Complex64;
use serde::Serialize;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library reports. Variants carry the data needed to
/// reproduce or locate the failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error, Serialize)]
#[serde(tag = "kind", content = "detail")]
pub enum Error {
    #[error("non-finite sample at {point:?}")]
    NonFiniteSample { point: Vec<f64> },

    #[error("right-hand side has non-zero mean {mean}")]
    NonZeroMean { mean: Complex64 },

    #[error("small divisor {divisor:e} below floor {floor:e} at mode {mode:?}, shift {shift}")]
    SmallDivisor {
        mode: Vec<i64>,
        shift: i64,
        divisor: f64,
        floor: f64,
    },

    #[error("|z| = {modulus} exceeds the domain radius {radius}")]
    OutOfDomain { modulus: f64, radius: f64 },

    #[error("no convergence after {iterations} iterations (reached {achieved:e})")]
    NoConvergence { iterations: usize, achieved: f64 },

    #[error("|w| = {modulus} outside the certified inversion radius {radius}")]
    OutOfCertifiedRange { modulus: f64, radius: f64 },

    #[error("Fourier tail {tail:e} beyond degree {cutoff}")]
    DegreeOverflow { cutoff: usize, tail: f64 },

    #[error("argument unwrapping still ambiguous at resolution {resolution}")]
    UnwrapAmbiguity { resolution: usize },

    #[error("certificate failure: {what} (value {value})")]
    CertificateFailure { what: String, value: f64 },

    #[error("approximation stalled at degree {degree}: gap {gap:e} above target {target:e}")]
    ApproximationStall { degree: usize, gap: f64, target: f64 },

    #[error("map is not attracting: kappa = {kappa}")]
    NotAttracting { kappa: f64 },

    #[error("linear part not uniformly contracting: sup |c_1| = {sup_modulus}")]
    NotContracting { sup_modulus: f64 },

    #[error("map is not indifferent: kappa = {kappa}")]
    NotIndifferent { kappa: f64 },

    #[error("linear part has non-zero degree {degree:?}")]
    NonZeroDegree { degree: Vec<i64> },

    #[error("map does not fix the zero section")]
    NotNormalized,

    #[error("only {found} admissible levels, {requested} requested")]
    InsufficientLiouville { found: usize, requested: usize },

    #[error("search exhausted at cap {cap} after {found} entries")]
    SearchExhausted { cap: u64, found: usize },

    #[error("rotation vector is rationally dependent: {relation:?}")]
    NotIndependent { relation: Vec<i64> },

    #[error("inverse branch broke down at theta = {theta:?}, w = {value}")]
    InverseBreakdown { theta: Vec<f64>, value: Complex64 },

    #[error("fiber {fiber} of a mask is empty")]
    EmptySet { fiber: usize },

    #[error("geometry mismatch: {what}")]
    GeometryMismatch { what: String },

    #[error("schedule exhausted after {levels} levels (last change {distance} px)")]
    ScheduleExhausted { levels: usize, distance: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short stable name used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonFiniteSample { .. } => "NonFiniteSample",
            Error::NonZeroMean { .. } => "NonZeroMean",
            Error::SmallDivisor { .. } => "SmallDivisor",
            Error::OutOfDomain { .. } => "OutOfDomain",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::OutOfCertifiedRange { .. } => "OutOfCertifiedRange",
            Error::DegreeOverflow { .. } => "DegreeOverflow",
            Error::UnwrapAmbiguity { .. } => "UnwrapAmbiguity",
            Error::CertificateFailure { .. } => "CertificateFailure",
            Error::ApproximationStall { .. } => "ApproximationStall",
            Error::NotAttracting { .. } => "NotAttracting",
            Error::NotContracting { .. } => "NotContracting",
            Error::NotIndifferent { .. } => "NotIndifferent",
            Error::NonZeroDegree { .. } => "NonZeroDegree",
            Error::NotNormalized => "NotNormalized",
            Error::InsufficientLiouville { .. } => "InsufficientLiouville",
            Error::SearchExhausted { .. } => "SearchExhausted",
            Error::NotIndependent { .. } => "NotIndependent",
            Error::InverseBreakdown { .. } => "InverseBreakdown",
            Error::EmptySet { .. } => "EmptySet",
            Error::GeometryMismatch { .. } => "GeometryMismatch",
            Error::ScheduleExhausted { .. } => "ScheduleExhausted",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::Unsupported(_) => "Unsupported",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Schema { .. } => "Schema",
            Error::Io(_) => "Io",
        }
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
