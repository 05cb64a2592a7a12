use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("element is not a unit of the local base ring (valuation {valuation})")]
    NonUnit { valuation: usize },

    #[error("operation not supported for the {0:?} backend")]
    BackendUnsupported(crate::scalar::Backend),

    #[error("values belong to different rings: {0} vs {1}")]
    RingMismatch(String, String),

    #[error("residue of the seed is not idempotent in the semisimple quotient")]
    ResidueNotIdempotent,

    #[error("Newton iteration for idempotent lifting did not converge (internal bug)")]
    NoConvergence,

    #[error("residue of target {0} is not a primitive idempotent")]
    NotPrimitiveResidue(usize),

    #[error("residues of targets {0} and {1} are not orthogonal")]
    NotOrthogonalResidues(usize, usize),

    #[error("sum of the family is not invertible; orthogonalization is obstructed")]
    NonInvertibleSum(crate::endo::NonInvertibleCert),

    #[error("infinite sum has no closed form in the supported class")]
    NotSummable,

    #[error("matrix has a row that is not zero-convergent")]
    NotRowConvergent,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
