use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not unitary within tolerance (defect {defect:.3e} > {tol:.3e})")]
    NonUnitary { defect: f64, tol: f64 },

    #[error("matrix determinant differs from 1 beyond tolerance (|det - 1| = {defect:.3e})")]
    NonUnitDeterminant { defect: f64 },

    #[error("invalid alcove point: {reason}")]
    InvalidAlcovePoint { reason: String },

    #[error("invalid coupling: {reason}")]
    InvalidCoupling { reason: String },

    #[error("coupling is within tolerance of a classification boundary; supply an exact rational y")]
    AmbiguousClassification,

    #[error("alcove point has a vanishing component; z-functions are defined on the open alcove only")]
    SingularAlcovePoint,

    #[error("partial eigenvalue-angle sum is too close to a pole of the z-functions")]
    NearPole,

    #[error("coupling violates the regularity condition e^(2imy) != 1 for m = 1..n")]
    IrregularCoupling,

    #[error("p = {p} and n = {n} are not coprime")]
    NotCoprime { p: i64, n: usize },

    #[error("y = p*pi/n collapses the simplex to the barycenter")]
    DegenerateSimplex,

    #[error("vertex enumeration is capped at n = {cap} (requested n = {n})")]
    EnumerationCap { n: usize, cap: usize },

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("point lies outside the open domain of the local model")]
    OutsideDomain,

    #[error("z-function value {value:.3e} is below the negativity tolerance")]
    NegativeZ { value: f64 },

    #[error("component v_n is too close to -1; the orthogonal frame g(v) is singular there")]
    VnNearMinusOne,

    #[error("matrix has eigenvalue gaps below the degeneracy threshold; cannot fix a diagonalizing frame")]
    SingularB,

    #[error("point lies outside the dense chart (some homogeneous coordinate vanishes)")]
    OutsideChart,

    #[error("parameters violate the matching condition lambda'(pi - n y') = lambda(n y - pi)")]
    MismatchedParameters,

    #[error("rejection sampling exceeded {cap} attempts")]
    ResampleCap { cap: u64 },

    #[error("eigendecomposition failed to converge to a diagonalizing frame")]
    EigenFailure,
}

pub type Result<T> = std::result::Result<T, Error>;
