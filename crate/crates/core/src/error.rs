use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: Pauli string has {found} qubits, expected {expected}")]
    InconsistentLength {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("Hamiltonian has no nonzero terms")]
    Empty,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("order {k} already contains all {terms} terms")]
    OrderFull { k: usize, terms: usize },

    #[error("truncation vector has no nonzero order")]
    NoActiveOrders,

    #[error("{what} needs {required}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        required: usize,
        cap: usize,
    },

    #[error("Hamiltonian matrix is not Hermitian (max |H - H^dag| = {residual:e})")]
    NonHermitian { residual: f64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("target epsilon {target:e} not reached before cost cap {cap} (epsilon = {reached:e})")]
    TargetUnreachable {
        target: f64,
        cap: usize,
        reached: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } => 3,
            Error::NoConvergence(_) | Error::TargetUnreachable { .. } => 4,
            _ => 2,
        }
    }
}
