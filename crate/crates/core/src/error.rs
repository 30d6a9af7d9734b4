use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("radii must be strictly increasing (violated at index {0})")]
    NonIncreasingRadii(usize),
    #[error("radius at index {0} is not a positive finite number")]
    NonPositiveRadius(usize),
    #[error("radii and alphas differ in length ({radii} vs {alphas})")]
    LengthMismatch { radii: usize, alphas: usize },
    #[error("coupling at index {0} is not finite")]
    NonFiniteCoupling(usize),
    #[error("at least one shell is required")]
    EmptyConfig,
    #[error("operation requires exactly two shells, got {0}")]
    WrongShellCount(usize),

    #[error("argument {x} overflows the modified spherical Bessel function of order {ell}")]
    Overflow { ell: usize, x: f64 },
    #[error("order {ell} exceeds the supported maximum {max}")]
    UnsupportedOrder { ell: usize, max: usize },
    #[error("argument must be positive and finite, got {0}")]
    InvalidArgument(f64),

    #[error("the s-wave has no zero-energy eigenstate")]
    SWaveThresholdForbidden,
    #[error("kappa*d = {0} is too large for the unscaled matching matrix")]
    MatchingOverflow(f64),
    #[error("one-shell root at kappa = {kappa} is degenerate (F_inf' = {derivative:e})")]
    DegenerateRoot { kappa: f64, derivative: f64 },
    #[error("the requested one-shell root does not exist")]
    MissingRoot,
    #[error("alpha1 = {alpha1} does not bind the inner shell of radius {r1} (need alpha1 < -1/R1)")]
    NoInnerBoundState { r1: f64, alpha1: f64 },

    #[error("invalid scan plan: {0}")]
    InvalidPlan(String),
    #[error("stopping rule did not trigger before ell_max = {0}")]
    EllMaxReached(usize),
    #[error("tunnelling pair not resolved at d = {d_cutoff} ({usable} usable separations)")]
    RootsNotResolved { d_cutoff: f64, usable: usize },
    #[error("counting law violated: {0}")]
    CountingViolation(String),

    #[error("invalid calibration input: {0}")]
    InvalidCalibration(&'static str),

    #[error("singular interface system at r = {0}")]
    SingularWronskian(f64),
    #[error("kappa = {kappa} is not a root (normalized mismatch {mismatch:e})")]
    NotARoot { kappa: f64, mismatch: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
