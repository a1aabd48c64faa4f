use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not symmetric: asymmetry {asymmetry:e} exceeds {allowed:e}")]
    Asymmetric { asymmetry: f64, allowed: f64 },

    #[error("malformed matrix: {0}")]
    Shape(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("eigenvalue {eigenvalue} lies outside the domain {domain} of `{function}`")]
    Domain {
        function: String,
        eigenvalue: f64,
        domain: String,
    },

    #[error("operand {operand} is not positive definite (lambda_min = {lambda_min:e}, lambda_max = {lambda_max:e})")]
    NotPositiveDefinite {
        operand: String,
        lambda_min: f64,
        lambda_max: f64,
    },

    #[error("quadrature did not reach tolerance: estimate {estimate:e} > {limit:e}")]
    Quadrature { estimate: f64, limit: f64 },

    #[error("invalid quadrature spec: {0}")]
    QuadratureSpec(String),

    #[error("unknown function `{id}`; known: {known}")]
    UnknownFunction { id: String, known: String },

    #[error("unknown chain `{id}`; registry: {known}")]
    UnknownChain { id: String, known: String },

    #[error("function `{function}` is not admissible for chain `{chain}`: {reason}")]
    Inadmissible {
        chain: String,
        function: String,
        reason: String,
    },

    #[error("generator: {0}")]
    Generation(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unbound name `{0}` in term")]
    Unbound(String),

    #[error("type error in term: {0}")]
    TermType(String),

    #[error("term `{term}` of chain `{chain}`: {source}")]
    Term {
        chain: String,
        term: String,
        source: Box<Error>,
    },

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
