use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AleError {
    #[error("point is {distance:.3e} from center {index}, inside the exclusion radius {eps:.1e}")]
    CenterTooClose {
        index: usize,
        distance: f64,
        eps: f64,
    },
    #[error("point lies on the Dirac string of center {index} in the {patch} patch")]
    OnDiracString { index: usize, patch: &'static str },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("metric is not positive definite")]
    SingularMetric,
    #[error("2-form frame is not orthonormal (deviation {deviation:.3e})")]
    FrameNotOrthonormal { deviation: f64 },
    #[error("gauge condition violated (residual {residual:.3e})")]
    GaugeViolation { residual: f64 },
    #[error("finite-difference stencil leaves the chart: {0}")]
    EvaluationDomain(String),
    #[error("normalization integral is degenerate ({value:.3e})")]
    NormalizationFailure { value: f64 },
    #[error("analytic tail is {fraction:.3} of the total, above the 10% limit")]
    TailDominance { fraction: f64 },
    #[error("least-squares fit is ill conditioned (condition number {condition:.3e})")]
    FitUnstable { condition: f64 },
    #[error("integrand is not finite at quadrature node {node}")]
    QuadratureDivergence { node: f64 },
    #[error("first obstruction does not vanish (|R+(I1)| = {norm:.3e})")]
    FirstObstructionNonzero { norm: f64 },
    #[error("instanton constants must be supplied for this group")]
    MissingConstants,
    #[error("schema error at {path}: {message}")]
    SchemaError { path: String, message: String },
    #[error("symmetry error: {0}")]
    SymmetryError(String),
}

pub type Result<T> = std::result::Result<T, AleError>;
