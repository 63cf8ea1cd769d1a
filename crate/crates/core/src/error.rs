use thiserror::Error;

/// Everything that can go wrong in the exact pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("the zero polynomial has no squarefree part")]
    ZeroPolynomial,

    #[error("matrix is not unipotent")]
    NotUnipotent,

    #[error("matrix is not nilpotent")]
    NotNilpotent,

    #[error("matrix is not semisimple")]
    NotSemisimple,

    #[error("element is not in the Lie algebra: {0}")]
    NotInAlgebra(String),

    #[error("invalid Lie algebra: {0}")]
    InvalidAlgebra(String),

    #[error("Jacobi identity fails for ({0}, {1}, {2})")]
    JacobiFailure(usize, usize, usize),

    #[error("matrix is not a Lie algebra automorphism: {0}")]
    NotAutomorphism(String),

    #[error("T-generator {0} does not normalize U")]
    NotNormalizing(String),

    #[error("T-generator {0}: conjugation action disagrees with its hol matrix")]
    HolMismatch(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("malformed word letter `{0}`")]
    MalformedWord(String),

    #[error("relator {0} evaluates to non-identity")]
    RelatorFailure(String),

    #[error("action on cochains does not commute with d in degree {degree}")]
    CommutationFailure { degree: usize },

    #[error("cohomology-of-invariants and invariants-of-cohomology disagree in degree {degree}: {via_complex} vs {via_cohomology}")]
    CohomologyMismatch {
        degree: usize,
        via_complex: usize,
        via_cohomology: usize,
    },

    #[error("dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("extension map f_{coset} fails r_i γ r_i^-1 on generator {generator}")]
    ExtensionIdentity { coset: usize, generator: String },

    #[error("inconsistent coset table: {0}")]
    InconsistentCosetTable(String),

    #[error("cannot parse rational `{0}`")]
    ParseRational(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
