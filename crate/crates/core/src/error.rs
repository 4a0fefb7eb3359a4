use thiserror::Error;

/// Errors produced by complex construction, spectral analysis, and the
/// certificate machinery.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("non-pure complex: facet {facet:?} has {got} vertices, expected {expected}")]
    NonPure {
        facet: Vec<String>,
        got: usize,
        expected: usize,
    },
    #[error("partite violation: {0}")]
    PartiteViolation(String),
    #[error("facet weight must be strictly positive, got {0}")]
    NonpositiveWeight(f64),
    #[error("face {0:?} is not in the complex")]
    FaceNotInComplex(Vec<String>),
    #[error("level {level} out of range for a {dim}-dimensional complex")]
    LevelOutOfRange { level: i64, dim: usize },
    #[error("operation requires a partite complex")]
    NotPartite,
    #[error("ground sets overlap: {0}")]
    GroundSetOverlap(String),
    #[error("face {face:?} has co-dimension {codim}, need at least 2")]
    CodimTooSmall { face: Vec<String>, codim: usize },
    #[error("graph is disconnected{}", witness_suffix(.witness))]
    Disconnected { witness: Option<Vec<String>> },
    #[error("cut must be a proper nonempty vertex subset")]
    EmptyOrFullSet,
    #[error("condition unsatisfiable: {0}")]
    ConditionUnsatisfiable(String),
    #[error("delta must lie in (0, 1), got {0}")]
    DeltaOutOfRange(f64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("certificate denominator nonpositive at part {part}, degree {degree}: {value}")]
    DenominatorNonpositive {
        part: usize,
        degree: usize,
        value: f64,
    },
    #[error("expected a 1-dimensional 2-partite complex, got dimension {dim}, {parts} parts")]
    WrongDimension { dim: usize, parts: usize },
    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),
    #[error("graph has no proper list coloring")]
    NoProperColoring,
    #[error("bad generator parameters: {0}")]
    BadParams(String),
    #[error("enumeration budget exceeded: {0}")]
    SizeCap(String),
    #[error("could not reach a totally connected complex after {0} retries")]
    ConnectivityUnreachable(usize),
    #[error("harmonic tail index {i} out of range for n = {n}")]
    IndexOutOfRange { n: usize, i: usize },
}

fn witness_suffix(witness: &Option<Vec<String>>) -> String {
    match witness {
        Some(face) => format!(" (witness link of {face:?})"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
