use thiserror::Error;

pub type Result<T> = std::result::Result<T, FrameError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds {allowed:.3e})")]
    NotHermitian { asymmetry: f64, allowed: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {min_eig:.3e})")]
    NotPositiveSemidefinite { min_eig: f64 },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("invalid tolerances: {0}")]
    InvalidTolerances(&'static str),
    #[error("columns are not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),
    #[error("weight {index} is not a positive finite number ({value})")]
    InvalidWeight { index: usize, value: f64 },
    #[error("null space of the divisor is not contained in the null space of the numerator (leak {leak:.3e})")]
    NullSpaceViolation { leak: f64 },
    #[error("family is not a frame: lower frame bound fails")]
    NotAFrame,
    #[error("system is not a fusion frame: fusion frame operator is singular")]
    NotAFusionFrame,
    #[error("family is not a K-frame")]
    NotAKFrame,
    #[error("system is not a K-fusion frame")]
    NotKFusion,
    #[error("block {index} does not lie in its subspace (leak {leak:.3e})")]
    BlockNotInSubspace { index: usize, leak: f64 },
    #[error("operator is zero")]
    ZeroOperator,
    #[error("operator {index} in the product is zero")]
    ZeroOperatorInProduct { index: usize },
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("member count mismatch: expected {expected}, found {found}")]
    MemberCountMismatch { expected: usize, found: usize },
    #[error("weights of system {system} differ from the shared weights")]
    WeightMismatch { system: usize },
    #[error("projection of member {index} does not commute with the projection onto V (commutator {norm:.3e})")]
    NonCommutingProjections { index: usize, norm: f64 },
    #[error("pseudo-inverse of P_V does not commute with K* (commutator {norm:.3e})")]
    CommutationHypothesisFailed { norm: f64 },
    #[error("reconstruction orders disagree by {gap:.3e}")]
    DualOrderMismatch { gap: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("hypothesis violated ({citation}): {detail}")]
    HypothesisViolated { citation: String, detail: String },
    #[error("unknown theorem id {0:?}")]
    UnknownTheorem(String),
}

impl FrameError {
    /// Input errors exit with status 2, failed properties with status 1.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            FrameError::NotAFrame
                | FrameError::NotAFusionFrame
                | FrameError::NotAKFrame
                | FrameError::NotKFusion
                | FrameError::DualOrderMismatch { .. }
                | FrameError::HypothesisViolated { .. }
        )
    }
}
