use thiserror::Error;

/// Errors reported by the library. Validation failures carry the magnitude
/// of the violated invariant so callers can see how far off the input was.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch in {context}: {detail}")]
    DimensionMismatch {
        context: &'static str,
        detail: String,
    },

    #[error("matrix is not Hermitian: max |A - A\u{2020}| entry is {max_asymmetry:.3e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("Jacobi eigensolver did not converge: off-diagonal norm {off_norm:.3e} after {sweeps} sweeps")]
    EigNotConverged { off_norm: f64, sweeps: usize },

    #[error("invalid prior: {detail}")]
    InvalidPrior { detail: String },

    #[error("invalid game: {detail}")]
    InvalidGame { detail: String },

    #[error("parameter `{name}` = {value} out of range, expected {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("Kraus operators are not trace preserving: |sum K\u{2020}K - I| = {residual:.3e}")]
    NotTracePreserving { residual: f64 },

    #[error("map is not completely positive: Choi matrix has eigenvalue {min_eigenvalue:.3e}")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("operator is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("operator trace is {trace}, expected 1")]
    InvalidTrace { trace: f64 },

    #[error("POVM elements do not sum to identity: max deviation {deviation:.3e}")]
    PovmIncomplete { deviation: f64 },

    #[error("enumeration budget exceeded: {required} deterministic maps, budget {budget}")]
    EnumerationBudget { required: u128, budget: u128 },

    #[error("no closed form applies: {detail}")]
    NoClosedForm { detail: String },

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid input spec: {detail}")]
    InvalidSpec { detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
