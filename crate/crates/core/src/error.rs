use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse grouping of failures, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input shape or malformed data.
    Input,
    /// The point or set is outside the region where the operation applies.
    Domain,
    /// A numerical procedure could not certify its result.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("real tuple carries imaginary entries (max |im| = {0:.3e})")]
    ImaginaryInRealTuple(f64),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("malformed input: {0}")]
    Parse(String),

    #[error("sum of gamma_i^* gamma_i deviates from the identity by {0:.3e}")]
    IllFormedCombination(f64),
    #[error("trace(gamma^* gamma) = {0} is not 1")]
    BadNormalization(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("free spectrahedron is unbounded (level-1 recession cone is nontrivial)")]
    UnboundedDomain,
    #[error("point lies outside the free spectrahedron (min eigenvalue {0:.3e})")]
    OutsideDomain(f64),
    #[error("extreme-point hierarchy violated: {0}")]
    HierarchyViolation(String),

    #[error("start point is infeasible (min eigenvalue {0:.3e})")]
    InfeasibleStart(f64),
    #[error("iteration cap of {0} exceeded")]
    IterationCapExceeded(usize),
    #[error("feasible set is unbounded along the requested direction")]
    UnboundedDirection,
    #[error("descent stalled: no admissible step from a non-extreme point")]
    DescentStalled,
    #[error("beta is not in the dilation subspace (residual {0:.3e})")]
    InfeasibleBeta(f64),
    #[error("dilation scale alpha is unbounded")]
    UnboundedAlpha,

    #[error("point is already a direct sum of free extreme points (dilation subspace is trivial)")]
    AlreadyMaximal,
    #[error("operation is implemented for the real field only")]
    FieldUnsupported,
    #[error("dilation subspace did not shrink ({before} -> {after})")]
    DescentFailure { before: usize, after: usize },
    #[error("block diagonalization failed: {0}")]
    BlockingFailure(String),

    #[error("tuple is not in the free cube (max |eig| = {0:.6})")]
    OutsideCube(f64),
    #[error("(T, X) is not a strict contraction (max eigenvalue of TT* + sum X_j^2 = {0:.6})")]
    NotStrictContraction(f64),
    #[error("T is singular (smallest singular value {0:.3e})")]
    SingularT(f64),
    #[error("level {0} is too large for exhaustive refutation search (max 3)")]
    LevelTooLarge(usize),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            DimensionMismatch(_)
            | NotHermitian { .. }
            | ImaginaryInRealTuple(_)
            | FieldMismatch(_)
            | Parse(_)
            | IllFormedCombination(_)
            | BadNormalization(_)
            | LevelTooLarge(_) => ErrorKind::Input,
            NotPsd(_)
            | UnboundedDomain
            | OutsideDomain(_)
            | InfeasibleStart(_)
            | UnboundedDirection
            | InfeasibleBeta(_)
            | UnboundedAlpha
            | AlreadyMaximal
            | FieldUnsupported
            | OutsideCube(_)
            | NotStrictContraction(_)
            | SingularT(_) => ErrorKind::Domain,
            HierarchyViolation(_)
            | IterationCapExceeded(_)
            | DescentStalled
            | DescentFailure { .. }
            | BlockingFailure(_) => ErrorKind::Numerical,
        }
    }
}
