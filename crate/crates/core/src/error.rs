use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range for a {bits}-bit register")]
    IndexOutOfRange { index: usize, bits: u32 },

    #[error(
        "periodic sum not converged after {shells} shells: remaining tail bound {achieved_bound:e} \
         relative to accumulated {accumulated:e}"
    )]
    Truncation {
        shells: usize,
        achieved_bound: f64,
        accumulated: f64,
    },

    #[error("angle ratio {ratio} for level m={m}, index i={i} lies outside [0, 1]")]
    RatioOutOfRange { ratio: f64, m: u32, i: usize },

    #[error("smoothing width eps={eps:e} is too small: every smoothed delta underflows, use a larger eps")]
    SmoothingUnderflow { eps: f64 },

    #[error("state normalization violated: sum of squares is {sum}")]
    Normalization { sum: f64 },

    #[error("qubit budget exceeded: {requested} qubits requested, limit is {limit}")]
    QubitBudget { requested: usize, limit: usize },

    #[error("malformed gate: {0}")]
    MalformedGate(String),

    #[error("unsupported gate for this pass: {0}")]
    UnsupportedGate(String),

    #[error("size mismatch: {0}")]
    Mismatch(String),

    #[error("post-selected branch has probability {probability:e}")]
    ZeroProbabilityBranch { probability: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
