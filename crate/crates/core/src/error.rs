use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("duplicate tensor factor `{0}`")]
    DuplicateFactor(String),
    #[error("unknown tensor factor `{0}`")]
    UnknownFactor(String),
    #[error("factor lists differ: [{left}] vs [{right}]")]
    FactorMismatch { left: String, right: String },
    #[error("factor dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("matrix side {actual} does not match the factor product {expected}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("expectation value has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("ket norm is {0}, expected 1")]
    NotNormalized(f64),
    #[error("matrix is not special unitary: {0}")]
    NotSpecialUnitary(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("group closure exceeded {cap} elements")]
    ClosureOverflow { cap: usize },
    #[error("{what}: direct value {direct} disagrees with closed form {formula}")]
    FormulaMismatch {
        what: String,
        direct: f64,
        formula: f64,
    },
    #[error("no closed form for test {0}")]
    NoFormula(String),
    #[error("{what}: computed {computed} disagrees with symbolic {symbolic}")]
    SymbolicMismatch {
        what: String,
        computed: f64,
        symbolic: f64,
    },
    #[error("linear program {index}: {detail}")]
    LpMismatch { index: usize, detail: String },
    #[error("membership routes disagree: coordinates say {coordinates}, projector traces say {projectors}")]
    EquivalenceMismatch { coordinates: bool, projectors: bool },
    #[error("premise violated: {0}")]
    PremiseViolated(String),
    #[error("reconstruction of {target} off by {error:e}")]
    ReconstructionMismatch { target: String, error: f64 },
    #[error("invalid test operator: {0}")]
    InvalidTest(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
