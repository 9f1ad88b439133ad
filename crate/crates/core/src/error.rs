use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The initial state coincides with the marked state up to a phase
    /// (cos γ = 0), or cos β = 0 where a conversion divides by it.
    #[error("degenerate initial state: {0}")]
    DegenerateInitialState(&'static str),

    /// E_o = 0: the marked-state probability is constant in time.
    #[error("zero spectral gap: the marked-state probability never changes")]
    ZeroGap,

    #[error("step size {dt} too large: dt * {scale_name} = {product} exceeds {limit}")]
    StepTooLarge {
        dt: f64,
        scale_name: &'static str,
        product: f64,
        limit: f64,
    },

    #[error("phase phi = {0} is not a multiple of pi")]
    PhaseNotMultipleOfPi(f64),

    #[error("state is not normalized: |a_w|^2 + |a_perp|^2 = {0}")]
    NotNormalized(f64),

    #[error("invalid search instance: {0}")]
    InvalidInstance(String),

    #[error("N = {0} exceeds the dense oracle limit of {1} items")]
    ScaleGuard(usize, usize),
}

pub type Result<T> = std::result::Result<T, SearchError>;
