use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },
    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),
    #[error("partial trace needs at least one kept qubit")]
    EmptyKeepSet,
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("state vector has norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("density matrix has trace {0}, expected 1")]
    TraceNotOne(f64),
    #[error("density matrix has negative eigenvalue {0}")]
    NotPositive(f64),
    #[error("fidelity {0} outside [0, 1]")]
    FidelityRange(f64),
    #[error("expectation value has imaginary part {0}")]
    ComplexExpectation(f64),
    #[error("postselection succeeds with probability {0}; branch is impossible")]
    ImpossibleBranch(f64),
    #[error("closed-form denominator {0} vanishes")]
    VanishingDenominator(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
