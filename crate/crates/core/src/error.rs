use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count {n} exceeds the configured maximum {max}")]
    DimensionOverflow { n: usize, max: usize },
    #[error("non-finite coefficient {value} on term {term}")]
    NonFiniteCoefficient { term: String, value: f64 },
    #[error("Pauli string length {got} does not match qubit count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("Hamiltonian does not commute with the global bit-flip operator (term {term})")]
    SymmetryViolation { term: String },
    #[error("matrix has complex off-diagonal entries; a real symmetric matrix is required")]
    ComplexEntries,
    #[error("matrix must be dense for this operation")]
    NotDense,
    #[error("shift must be non-negative, got {0}")]
    NegativeShift(f64),
    #[error("term {term} is not admissible for Pauli-level de-signing: {reason}")]
    LocalityViolation { term: String, reason: String },
    #[error("k-subsets {first} and {second} both contribute to flip mask {mask:#b}")]
    OverlapAmbiguity { first: String, second: String, mask: u64 },
    #[error("requested {k} eigenvalues of a {dim}-dimensional matrix")]
    InvalidEigenCount { k: usize, dim: usize },
    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("ground or first-excited level is degenerate (spacing {spacing:e})")]
    Degeneracy { spacing: f64 },
    #[error("no uniquely solvable instance after {retries} retries")]
    RetriesExhausted { retries: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("integrator exceeded the step limit of {limit}")]
    StepLimitExceeded { limit: usize },
    #[error("ground-state population did not stabilize: last change {delta:e} at tolerance {tol:e}")]
    PopulationUnstable { delta: f64, tol: f64 },
    #[error("norm drift {drift:e} exceeds tolerance {tol:e}")]
    NormDriftExceeded { drift: f64, tol: f64 },
    #[error("vertex {0} is isolated; the normalized Laplacian is undefined")]
    IsolatedVertex(usize),
    #[error("subset has {size} vertices; exhaustive search is limited to {max}")]
    SubsetTooLarge { size: usize, max: usize },
    #[error("empty vertex subset")]
    EmptySubset,
    #[error("graph has {size} vertices; exhaustive Cheeger search is limited to {max}")]
    GraphTooLarge { size: usize, max: usize },
}
