use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("argument outside function domain: {0}")]
    Domain(String),

    /// The Laplace transform was evaluated at (or within 1e-12 of) a pole.
    #[error("transform evaluated at a pole of the claim transform")]
    TransformPole,

    /// The characteristic equation has a (numerically) repeated root. The
    /// partial-fraction representation assumes simple poles; perturbing the
    /// discount rate by ~1e-9 separates them.
    #[error("repeated characteristic roots (closest pair separated by {separation:.3e}); perturb q by ~1e-9")]
    RepeatedRoots { separation: f64 },

    /// The requested operation only supports models without a diffusion part.
    #[error("operation requires sigma_tilde = 0 (got {sigma_tilde})")]
    DiffusionUnsupported { sigma_tilde: f64 },

    #[error("invalid approximation: {0}")]
    InvalidApproximation(String),

    #[error("ruin formula undefined: loading of the evaluated model is {theta} <= 0")]
    NoRuinFormula { theta: f64 },

    #[error("degenerate policy at (a={a}, b={b}): value denominator {denominator} <= 0")]
    DegeneratePolicy { a: f64, b: f64, denominator: f64 },

    /// The buffer equation has no positive solution at this barrier.
    #[error("no positive buffer solves the stationarity equation at b={b}")]
    InfeasibleBuffer { b: f64 },

    /// k_c is only defined when the penalty exceeds the threshold `p_lower`.
    #[error("critical cost undefined for P={penalty}: requires P > {p_lower}")]
    CriticalCostUndefined { penalty: f64, p_lower: f64 },

    #[error("no penalty makes b={b} a stationary barrier (log argument {argument} <= 0)")]
    NoPenaltyExists { b: f64, argument: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// True when the error reflects bad input rather than a numerical
    /// breakdown; the CLI maps these to exit code 2 and everything else to 3.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidDistribution(_)
                | Error::InvalidModel(_)
                | Error::Domain(_)
                | Error::DiffusionUnsupported { .. }
                | Error::Config(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
