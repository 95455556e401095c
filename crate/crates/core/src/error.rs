use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph is not regular: vertex {vertex_a} has degree {degree_a}, vertex {vertex_b} has degree {degree_b}")]
    Irregular {
        vertex_a: usize,
        degree_a: usize,
        vertex_b: usize,
        degree_b: usize,
    },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),

    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("vertex sets overlap at vertex {0}")]
    Overlap(usize),

    #[error("instance too large for brute force: n = {n} exceeds cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no degree-preserving swap found after {attempts} attempts")]
    SwapExhausted { attempts: usize },

    #[error("eigensolver did not converge within {iterations} iterations")]
    EigenNonConvergence { iterations: usize },

    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace {trace} exceeds bound {bound}")]
    TraceViolation { trace: f64, bound: f64 },

    #[error("mutual information {value:e} is below tolerance; backend data is inconsistent")]
    NegativeInformation { value: f64 },

    #[error("cannot condition vertex {vertex} on a zero-probability symbol {symbol}")]
    ZeroProbability { vertex: usize, symbol: usize },

    #[error("conditioning exhausted every symbol for vertex {vertex}")]
    ConditioningExhausted { vertex: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("infeasible pin: {0}")]
    InfeasiblePin(String),

    #[error("solver hit the iteration cap ({iterations}) with primal residual {primal:e}, dual residual {dual:e}")]
    IterationCap {
        iterations: usize,
        primal: f64,
        dual: f64,
    },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("backend inconsistency: {0}")]
    BackendInconsistency(String),
}

impl Error {
    /// Stable machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Irregular { .. } => "irregular",
            Error::SelfLoop(_) => "self_loop",
            Error::DuplicateEdge(..) => "duplicate_edge",
            Error::VertexOutOfRange { .. } => "vertex_out_of_range",
            Error::DegreeMismatch { .. } => "degree_mismatch",
            Error::SizeMismatch { .. } => "size_mismatch",
            Error::Overlap(_) => "overlap",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::SwapExhausted { .. } => "swap_exhausted",
            Error::EigenNonConvergence { .. } => "eigen_non_convergence",
            Error::NotPsd { .. } => "not_psd",
            Error::TraceViolation { .. } => "trace_violation",
            Error::NegativeInformation { .. } => "negative_information",
            Error::ZeroProbability { .. } => "zero_probability",
            Error::ConditioningExhausted { .. } => "conditioning_exhausted",
            Error::Infeasible(_) => "infeasible",
            Error::InfeasiblePin(_) => "infeasible_pin",
            Error::IterationCap { .. } => "iteration_cap",
            Error::NumericalBreakdown(_) => "numerical_breakdown",
            Error::Precondition(_) => "precondition",
            Error::BackendInconsistency(_) => "backend_inconsistency",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
