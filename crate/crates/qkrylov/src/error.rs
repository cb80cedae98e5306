//! Error type shared by all simulator modules.

use thiserror::Error;

/// Everything that can go wrong across the linear-algebra oracle, the quantum
/// primitives and the algorithm layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max entrywise deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is numerically zero")]
    ZeroMatrix,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("eigendecomposition did not converge")]
    EigenFailed,

    #[error("vector is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid parameter: {0}")]
    ParamInvalid(String),

    #[error("operator is not unitary (eigenvalue modulus off by {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("input state lies outside the span of the listed eigenvectors (residual {residual:.3e})")]
    OutsideSpan { residual: f64 },

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("|f(lambda) C| = {value:.6} exceeds 1; rotation constant too large")]
    BadConstant { value: f64 },

    #[error("linear combination is numerically zero; postselection can never succeed")]
    ZeroCombination,

    #[error("states are nearly parallel (angle {angle:.3e}); rotation plane ill-defined")]
    NearlyParallel { angle: f64 },

    #[error("states are nearly antiparallel (angle {angle:.6}); rotation plane ill-defined")]
    NearlyAntiparallel { angle: f64 },

    #[error("target combination alpha*a + beta*b is numerically zero")]
    ZeroTarget,

    #[error("plus/minus pair disagrees on shared structure: {0}")]
    InconsistentPair(String),

    #[error("iterate vanished: ||x^(eta)|| below 1e-12")]
    ZeroSolution,

    #[error("padded dimension {dim} exceeds the configured cap {cap}")]
    PaddingOverflow { dim: usize, cap: usize },

    #[error("coefficient recursion divides by h[{step}+1,{step}] = {value:.3e} <= delta = {delta:.3e}")]
    BreakdownDivision { step: usize, value: f64, delta: f64 },

    #[error("Krylov vectors numerically dependent (condition number {kappa:.3e})")]
    DegenerateKrylov { kappa: f64 },

    #[error("projected system H is singular")]
    SingularH,

    #[error("matrix is not positive definite: p^T A p = {value:.3e}")]
    NotSpd { value: f64 },

    #[error("estimated residual stagnated for {steps} consecutive steps; estimation accuracy too coarse")]
    StagnantResidual { steps: usize },

    #[error("accuracy cannot resolve integer answers: eps * s^l = {value:.3} >= 0.5")]
    PrecisionInsufficient { value: f64 },

    #[error("no dominant eigenvalue gap: |l1| - |l2| = {gap:.3e}")]
    NoDominantGap { gap: f64 },

    #[error("initial vector has no component along the dominant eigenvector")]
    ZeroOverlap,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
