use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("{what} needs {n} qubits, above the dense cap of {cap}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },
    #[error("invalid Pauli string {0:?}")]
    InvalidPauli(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("duplicate Pauli {0} in set")]
    Duplicate(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("generators are linearly dependent")]
    DependentGenerators,
    #[error("generators {0} and {1} anticommute")]
    NotCommuting(String, String),
    #[error("group is not maximal ({rank} generators on {n} qubits)")]
    NotMaximal { rank: usize, n: usize },
    #[error("no covering available for {0} qubits")]
    UnsupportedCovering(usize),
    #[error("vertex {0} is not covered by any colour class")]
    Uncovered(String),
    #[error("independent set enumeration exceeded {0} sets")]
    TooManySets(usize),
    #[error("linear program is {0}")]
    Lp(&'static str),
    #[error("no state found within {0:.3e} of the absolute estimates")]
    SearchFailed(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("verifier failure: {0}")]
    Verifier(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
