use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or out-of-contract input.
    Input,
    /// The input is well formed but fails a mathematical validation
    /// (commutativity, row contraction, hypothesis admissibility, ...).
    Validation,
    /// A numerical procedure could not produce a trustworthy answer.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("multi-index degree {degree} exceeds the exact factorial limit {limit}")]
    DegreeOverflow { degree: usize, limit: usize },

    #[error("point {index} lies outside the open unit ball (norm {norm})")]
    OutsideBall { index: usize, norm: f64 },

    #[error("points {first} and {second} coincide")]
    DuplicatePoints { first: usize, second: usize },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not positive definite (offending eigenvalue {eigenvalue:.3e})")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("ambiguous rank decision in {what}: singular value gap ratio {ratio:.3e}")]
    AmbiguousRank { what: &'static str, ratio: f64 },

    #[error("jet order {order} is not supported by degree bound {degree_bound} (max generator degree {max_generator_degree})")]
    JetOrderTooHigh {
        order: usize,
        degree_bound: usize,
        max_generator_degree: usize,
    },

    #[error("multi-index of degree {degree} exceeds truncation degree {max_degree}")]
    BeyondTruncation { degree: usize, max_degree: usize },

    #[error("order exceeds bound: no polynomial order found below {bound}")]
    OrderExceedsBound { bound: usize },

    #[error("point is not an isolated zero of the ideal (generators vanish near it)")]
    NotIsolated,

    #[error("tuple is not commuting (commutator defect {defect:.3e})")]
    NotCommuting { defect: f64 },

    #[error("tuple is not a row contraction (row defect {defect:.3e})")]
    NotRowContraction { defect: f64 },

    #[error("tuple is not nilpotent (defect {defect:.3e})")]
    NotNilpotent { defect: f64 },

    #[error("vector is not cyclic (Krylov rank {rank} of {dim})")]
    NotCyclic { rank: usize, dim: usize },

    #[error("simultaneous triangularization failed after {attempts} attempts (commutator defect {defect:.3e})")]
    Triangularization { attempts: usize, defect: f64 },

    #[error("ill-conditioned {what} (condition estimate {cond:.3e})")]
    IllConditioned { what: &'static str, cond: f64 },

    #[error("{what}: residual {residual:.3e} above tolerance {tol:.3e}")]
    Residual {
        what: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("monomial ideal has infinite complement: no pure power of x_{} among the generators", .variable + 1)]
    InfiniteComplement { variable: usize },

    #[error("not a monomial ideal: {0}")]
    NotMonomial(String),

    #[error("annihilator mismatch: {0}")]
    AnnihilatorMismatch(String),

    #[error("hypotheses inadmissible: eps * card(Xi) = {product:.6} (must be < 1)")]
    Inadmissible { product: f64 },

    #[error("layered Krylov sum is not direct; gauge unverified")]
    GaugeUnverified,

    #[error("localization mismatch at point {point}: {detail}")]
    LocalizationMismatch { point: usize, detail: String },

    #[error("resolvent failure: I - sum conj(w_j) T_j is singular (spectrum meets the pole set)")]
    Resolvent,

    #[error("truncation tail bound {bound:.3e} above tolerance {tol:.3e}")]
    TailBound { bound: f64, tol: f64 },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Dimension(_)
            | NonFinite { .. }
            | InvalidInput(_)
            | DegreeOverflow { .. }
            | OutsideBall { .. }
            | DuplicatePoints { .. }
            | JetOrderTooHigh { .. }
            | BeyondTruncation { .. }
            | NotMonomial(_)
            | InfiniteComplement { .. } => ErrorClass::Input,
            NotHermitian { .. }
            | NotCommuting { .. }
            | NotRowContraction { .. }
            | NotNilpotent { .. }
            | NotCyclic { .. }
            | NotIsolated
            | OrderExceedsBound { .. }
            | AnnihilatorMismatch(_)
            | Inadmissible { .. }
            | GaugeUnverified
            | LocalizationMismatch { .. } => ErrorClass::Validation,
            NotPositiveDefinite { .. }
            | Singular(_)
            | NoConvergence(_)
            | AmbiguousRank { .. }
            | Triangularization { .. }
            | IllConditioned { .. }
            | Residual { .. }
            | Resolvent
            | TailBound { .. } => ErrorClass::Numerical,
        }
    }
}
