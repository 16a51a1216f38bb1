use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("no bracket found for {what} in [{lo}, {hi}]")]
    NoBracket { what: &'static str, lo: f64, hi: f64 },

    #[error("extrapolation did not settle: {0}")]
    Extrapolation(String),

    #[error("newton failed after {iterations} iterations (residual {residual:.3e})")]
    Newton { iterations: usize, residual: f64 },

    #[error("continuation step underflow at {at}: {reason}")]
    StepUnderflow { at: String, reason: String },

    #[error("channel {0} is closed at this energy")]
    ClosedChannel(usize),

    #[error("singular block at site {site}")]
    Singular { site: i64 },

    #[error("lattice too coarse: p·a = {pa:.3} for channel {channel}")]
    Coarse { pa: f64, channel: usize },

    #[error("unitarity defect {defect:.3e} exceeds {tol:.1e}")]
    Unitarity { defect: f64, tol: f64 },

    #[error("insufficient points: {got} (need {need})")]
    InsufficientPoints { got: usize, need: usize },

    #[error("tail is not asymptotic: oscillator energy varies by {0:.3e}")]
    NotAsymptotic(f64),

    #[error("linear algebra: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParam(_) => 2,
            _ => 3,
        }
    }
}
