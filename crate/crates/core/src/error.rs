use thiserror::Error;

/// Errors raised by the model, certificate and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error("invalid time function: {0}")]
    InvalidTimeFunction(String),

    #[error("invalid delay: {0}")]
    InvalidDelay(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// `∫ e^{w t} f(t) dt` does not converge because some active term decays no faster than the weight grows.
    #[error("divergent integral: term with rate {rate} does not beat weight rate {weight_rate}")]
    DivergentIntegral { rate: f64, weight_rate: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("problem fails validation: {0}")]
    InvalidProblem(String),

    /// Boundedness of `α_i` or `e^{σt}β_i` fails, so no almost-sure certificate exists.
    #[error("boundedness condition violated: {0}")]
    Unbounded(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("history lookup at s={s} outside buffered window [{lo}, {hi}]")]
    HistoryOutOfRange { s: f64, lo: f64, hi: f64 },

    #[error("degenerate fit window: {0}")]
    DegenerateFit(String),

    #[error("path was simulated without state retention")]
    StateNotRetained,
}

pub type Result<T> = std::result::Result<T, Error>;
