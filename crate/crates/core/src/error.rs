use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong across the library.
///
/// Variants are grouped by how the CLI reports them: input problems,
/// numerical failures, and refusals where a theorem hypothesis does not hold.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("weight b[{factor}][{column}] is zero")]
    ZeroWeight { factor: usize, column: usize },

    #[error("the sign/weight matrix I_B is singular (|det| = {det:e})")]
    SingularIB { det: f64 },

    #[error("base amplitude {index} vanishes ({value:e}); frequencies look rationally dependent")]
    ZeroAmplitude { index: usize, value: f64 },

    #[error("relation search needs {cells:e} lattice points, above the 1e8 budget")]
    BudgetExceeded { cells: f64 },

    #[error("delay search for column {column} exhausted its budget (best distance {best_distance:.4} rad)")]
    SearchExhausted { column: usize, best_distance: f64 },

    #[error("Newton iteration did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("iterate left the domain: delay {index} = {value:e} is not positive")]
    LeftDomain { index: usize, value: f64 },

    #[error("Jacobian is singular")]
    SingularJacobian,

    #[error("reduced matrix B is singular (det = {det:e})")]
    SingularB { det: f64 },

    #[error("bad factor index: {0}")]
    BadIndex(String),

    #[error("n = {0} has the wrong parity for this operation")]
    BadParity(usize),

    #[error("even n = {n}: zero factor weights at (k, j) = {pairs:?}")]
    EvenDegeneracy { n: usize, pairs: Vec<(usize, usize)> },

    #[error("a root lies on the contour (min |f| = {min_abs:e})")]
    BoundaryRoot { min_abs: f64 },

    #[error("region holds {count} roots, more than the requested {max}")]
    TooManyRoots { count: usize, max: usize },
}

impl Error {
    /// Short machine-readable identifier, used in JSON diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::ZeroWeight { .. } => "ZeroWeight",
            Error::SingularIB { .. } => "SingularIB",
            Error::ZeroAmplitude { .. } => "ZeroAmplitude",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::SearchExhausted { .. } => "SearchExhausted",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::LeftDomain { .. } => "LeftDomain",
            Error::SingularJacobian => "SingularJacobian",
            Error::SingularB { .. } => "SingularB",
            Error::BadIndex(_) => "BadIndex",
            Error::BadParity(_) => "BadParity",
            Error::EvenDegeneracy { .. } => "EvenDegeneracy",
            Error::BoundaryRoot { .. } => "BoundaryRoot",
            Error::TooManyRoots { .. } => "TooManyRoots",
        }
    }
}
